//! Low-Mach diagnostics: l1 norms of the scaled pressure gradient, of the
//! vertex and central divergences and of the second x-difference of `u`,
//! conserved totals, radial scatter extraction and log-log slope fits.

use crate::error::{Error, Result};
use crate::grid::{sound_speed_and_mach, Axis, Field};
use crate::stencil::{discrete_divergence, second_diff, CellScalarField};

/// Column names of the diagnostics CSV, in order.
pub const CSV_HEADER: &str =
    "time,l1_gradp_x,l1_gradp_y,l1_div_multid,l1_div_central,l1_d2u,mass,mom_x,mom_y,energy,max_mach";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    /// `(1/N) sum |eps^2 (p_{i+1} - p_{i-1}) / 2|`
    pub l1_gradp_x: f64,
    pub l1_gradp_y: f64,
    /// `dx (1/N) sum |D|` over the `nx x ny` vertices `(i+1/2, j+1/2)`.
    pub l1_div_multid: f64,
    /// `(1/N) sum |[u]_{i+-1}/2 + [v]_{j+-1}/2|`
    pub l1_div_central: f64,
    /// `(1/N) sum |u_{i+1} - 2 u_i + u_{i-1}|`
    pub l1_d2u: f64,
    /// Integrals of the conserved variables (sums times cell area).
    pub mass: f64,
    pub mom_x: f64,
    pub mom_y: f64,
    pub energy: f64,
    pub max_mach: f64,
}

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        let v = [
            self.time,
            self.l1_gradp_x,
            self.l1_gradp_y,
            self.l1_div_multid,
            self.l1_div_central,
            self.l1_d2u,
            self.mass,
            self.mom_x,
            self.mom_y,
            self.energy,
            self.max_mach,
        ];
        v.iter()
            .map(|x| format!("{x:.17e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Velocity and pressure fields (ghosts included) of a field whose ghosts
/// are filled.
fn primitive_fields(f: &Field, gamma: f64) -> Result<[CellScalarField; 3]> {
    let s = f.spec();
    let mut u = CellScalarField::zeros(s.nx, s.ny);
    let mut v = CellScalarField::zeros(s.nx, s.ny);
    let mut p = CellScalarField::zeros(s.nx, s.ny);
    let (ix, iy) = u.valid();
    for j in iy {
        for i in ix.clone() {
            let w = f.primitive(i, j, gamma)?;
            u.set(i, j, w.u);
            v.set(i, j, w.v);
            p.set(i, j, w.p);
        }
    }
    Ok([u, v, p])
}

/// Evaluates all diagnostics of `f` (ghosts filled). `eps_report` scales the
/// pressure-gradient norms by `eps_report^2`.
pub fn measure(f: &Field, gamma: f64, eps_report: f64, time: f64) -> Result<DiagnosticsRecord> {
    let s = f.spec();
    let (nx, ny) = (s.nx as isize, s.ny as isize);
    let n = s.n_cells() as f64;
    let [u, v, p] = primitive_fields(f, gamma)?;
    let e2 = eps_report * eps_report;
    let d2u = second_diff(&u, Axis::X);
    let div = discrete_divergence(&u, &v, s.dx, s.dy);
    let mut acc = [0.0f64; 5];
    let mut max_mach = 0.0f64;
    for j in 0..ny {
        for i in 0..nx {
            acc[0] += (e2 * (p.get(i + 1, j) - p.get(i - 1, j)) / 2.0).abs();
            acc[1] += (e2 * (p.get(i, j + 1) - p.get(i, j - 1)) / 2.0).abs();
            acc[2] += div.get(i, j).abs();
            acc[3] += ((u.get(i + 1, j) - u.get(i - 1, j)) / 2.0
                + (v.get(i, j + 1) - v.get(i, j - 1)) / 2.0)
                .abs();
            acc[4] += d2u.get(i, j).abs();
            max_mach = max_mach.max(sound_speed_and_mach(&f.primitive(i, j, gamma)?, gamma).1);
        }
    }
    let area = s.dx * s.dy;
    let t = f.totals();
    Ok(DiagnosticsRecord {
        time,
        l1_gradp_x: acc[0] / n,
        l1_gradp_y: acc[1] / n,
        l1_div_multid: s.dx * acc[2] / n,
        l1_div_central: acc[3] / n,
        l1_d2u: acc[4] / n,
        mass: t[0] * area,
        mom_x: t[1] * area,
        mom_y: t[2] * area,
        energy: t[3] * area,
        max_mach,
    })
}

/// One cell of a radial scatter plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub r: f64,
    pub rho: f64,
    /// Magnitude of the radial velocity component.
    pub vrad: f64,
    pub p: f64,
}

pub const SCATTER_CSV_HEADER: &str = "r,rho,vrad,p";

/// `(r, rho, |v . e_r|, p)` for every interior cell, `r` measured from `center`.
pub fn radial_scatter(f: &Field, gamma: f64, center: (f64, f64)) -> Result<Vec<ScatterPoint>> {
    let s = f.spec();
    let mut out = Vec::with_capacity(s.n_cells());
    for (i, j) in s.cells() {
        let w = f.primitive(i, j, gamma)?;
        let (dx, dy) = s.offset_from(i, j, center.0, center.1);
        let r = dx.hypot(dy);
        let vrad = if r > 0.0 {
            (w.u * dx + w.v * dy) / r
        } else {
            0.0
        };
        out.push(ScatterPoint {
            r,
            rho: w.rho,
            vrad: vrad.abs(),
            p: w.p,
        });
    }
    Ok(out)
}

/// Largest density difference between a field and its mirror images in `x`
/// and in `y`.
pub fn reflection_asymmetry(f: &Field) -> f64 {
    let s = f.spec();
    let (nx, ny) = (s.nx as isize, s.ny as isize);
    let mut worst = 0.0f64;
    for (i, j, q) in f.interior() {
        worst = worst
            .max((q.rho - f.get(nx - 1 - i, j).rho).abs())
            .max((q.rho - f.get(i, ny - 1 - j).rho).abs());
    }
    worst
}

/// Least-squares slope of `ln(norm)` against `ln(eps)`.
pub fn slope_fit(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs at least two points, got {}",
            pairs.len()
        )));
    }
    if let Some(bad) = pairs.iter().find(|(e, n)| !(*e > 0.0 && *n > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs positive values, got {bad:?}"
        )));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|(e, n)| (e.ln(), n.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "slope fit needs distinct abscissae".into(),
        ));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}
