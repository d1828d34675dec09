//! Fine-grid solution of the radially symmetric (cylindrical) Euler
//! equations, used as the reference curve for two-dimensional radial Sod
//! runs.
//!
//! The equations are integrated in the weighted conservative form
//!
//! ```text
//! d/dt (r q) + d/dr (r F(q)) = (0, p, 0),
//! ```
//!
//! with first-order finite volumes. Cell `i` has the weighted volume
//! `r_i dr`, and the face at `r = 0` has zero weight, so it needs no boundary
//! state at all and `sum_i r_i rho_i dr` is conserved exactly until waves
//! reach the outer boundary. The planar geometry (unit weights, no source)
//! is available as a sanity check against the exact Riemann solution.

use crate::{OracleError, Prim1d};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Planar,
    Cylindrical,
}

/// Initial jump between an inner and an outer state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    pub inner: Prim1d,
    pub outer: Prim1d,
    pub r_jump: f64,
    pub r_max: f64,
    pub t_end: f64,
    pub gamma: f64,
    pub cfl: f64,
    pub geometry: Geometry,
}

impl RadialProblem {
    /// Cylindrical Sod problem: `(1, 0, 1)` inside `r = 0.3`,
    /// `(0.125, 0, 0.1)` outside, on `[0, 0.75]`.
    pub fn radial_sod(t_end: f64) -> Self {
        Self {
            inner: Prim1d::new(1.0, 0.0, 1.0),
            outer: Prim1d::new(0.125, 0.0, 0.1),
            r_jump: 0.3,
            r_max: 0.75,
            t_end,
            gamma: 1.4,
            cfl: 0.5,
            geometry: Geometry::Cylindrical,
        }
    }

    /// Planar Sod shock tube on `[0, 1]` with the jump at `0.5`.
    pub fn planar_sod(t_end: f64) -> Self {
        Self {
            r_jump: 0.5,
            r_max: 1.0,
            geometry: Geometry::Planar,
            ..Self::radial_sod(t_end)
        }
    }
}

/// One cell of the reference solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub rho: f64,
    pub u_r: f64,
    pub p: f64,
}

/// Final state of a reference run together with its weighted mass budget.
#[derive(Debug, Clone)]
pub struct RadialRun {
    pub samples: Vec<RadialSample>,
    pub steps: usize,
    pub mass_initial: f64,
    pub mass_final: f64,
}

#[derive(Debug, Clone, Copy)]
struct Cons {
    rho: f64,
    m: f64,
    e: f64,
}

fn to_cons(w: &Prim1d, gamma: f64) -> Cons {
    Cons {
        rho: w.rho,
        m: w.rho * w.u,
        e: w.p / (gamma - 1.0) + 0.5 * w.rho * w.u * w.u,
    }
}

fn to_prim(q: &Cons, gamma: f64) -> Result<Prim1d, OracleError> {
    let u = q.m / q.rho;
    let p = (gamma - 1.0) * (q.e - 0.5 * q.m * u);
    if !(q.rho > 0.0 && p > 0.0) {
        return Err(OracleError::InvalidState(format!(
            "rho = {}, p = {p}",
            q.rho
        )));
    }
    Ok(Prim1d::new(q.rho, u, p))
}

/// Suliciu relaxation flux between two 1D states.
fn relaxation_flux(wl: &Prim1d, wr: &Prim1d, gamma: f64) -> [f64; 3] {
    let rcl = (gamma * wl.p * wl.rho).sqrt();
    let rcr = (gamma * wr.p * wr.rho).sqrt();
    let mut a = 1.01 * rcl.max(rcr);
    let energy = |w: &Prim1d| w.p / (gamma - 1.0) + 0.5 * w.rho * w.u * w.u;
    loop {
        let us = 0.5 * (wl.u + wr.u) - (wr.p - wl.p) / (2.0 * a);
        let ps = 0.5 * (wl.p + wr.p) - 0.5 * a * (wr.u - wl.u);
        let tl = 1.0 / wl.rho + (us - wl.u) / a;
        let tr = 1.0 / wr.rho + (wr.u - us) / a;
        if tl > 0.0 && tr > 0.0 {
            let sl = wl.u - a / wl.rho;
            let sr = wr.u + a / wr.rho;
            let outer = |w: &Prim1d| {
                let m = w.rho * w.u;
                [m, m * w.u + w.p, w.u * (energy(w) + w.p)]
            };
            let star = |tau: f64, w: &Prim1d, sign: f64| {
                let rho = 1.0 / tau;
                let spec_e = energy(w) / w.rho + sign * (w.p * w.u - ps * us) / a;
                [rho * us, rho * us * us + ps, rho * us * spec_e + ps * us]
            };
            return if sl > 0.0 {
                outer(wl)
            } else if us > 0.0 {
                star(tl, wl, 1.0)
            } else if sr > 0.0 {
                star(tr, wr, -1.0)
            } else {
                outer(wr)
            };
        }
        a *= 2.0;
    }
}

/// Runs the reference problem on `n` cells.
pub fn solve_radial(problem: &RadialProblem, n: usize) -> Result<RadialRun, OracleError> {
    if n < 2 || !(problem.r_max > 0.0) || !(problem.t_end >= 0.0) {
        return Err(OracleError::InvalidArgument(format!(
            "need n >= 2, r_max > 0, t_end >= 0 (n = {n})"
        )));
    }
    let g = problem.gamma;
    let dr = problem.r_max / n as f64;
    let center = |i: usize| (i as f64 + 0.5) * dr;
    let (face_w, vol): (Vec<f64>, Vec<f64>) = match problem.geometry {
        Geometry::Planar => (vec![1.0; n + 1], vec![dr; n]),
        Geometry::Cylindrical => (
            (0..=n).map(|i| i as f64 * dr).collect(),
            (0..n).map(|i| center(i) * dr).collect(),
        ),
    };
    let mut q: Vec<Cons> = (0..n)
        .map(|i| {
            let w = if center(i) < problem.r_jump {
                problem.inner
            } else {
                problem.outer
            };
            to_cons(&w, g)
        })
        .collect();
    let mass = |q: &[Cons]| q.iter().zip(&vol).map(|(c, v)| c.rho * v).sum::<f64>();
    let mass_initial = mass(&q);
    let mut t = 0.0;
    let mut steps = 0;
    let mut w: Vec<Prim1d> = Vec::with_capacity(n + 2);
    let mut flux = vec![[0.0; 3]; n + 1];
    while t < problem.t_end {
        w.clear();
        // reflective inner ghost, zero-gradient outer ghost
        let first = to_prim(&q[0], g)?;
        w.push(Prim1d::new(first.rho, -first.u, first.p));
        for c in &q {
            w.push(to_prim(c, g)?);
        }
        w.push(*w.last().expect("n >= 2"));
        let smax = w
            .iter()
            .map(|s| s.u.abs() + (g * s.p / s.rho).sqrt())
            .fold(0.0f64, f64::max);
        let dt = (problem.cfl * dr / smax).min(problem.t_end - t);
        for (k, f) in flux.iter_mut().enumerate() {
            *f = relaxation_flux(&w[k], &w[k + 1], g);
        }
        for i in 0..n {
            let (l, r) = (face_w[i], face_w[i + 1]);
            let lam = dt / vol[i];
            let src = match problem.geometry {
                Geometry::Planar => 0.0,
                Geometry::Cylindrical => dt * w[i + 1].p * dr / vol[i],
            };
            let c = &mut q[i];
            c.rho -= lam * (r * flux[i + 1][0] - l * flux[i][0]);
            c.m -= lam * (r * flux[i + 1][1] - l * flux[i][1]);
            c.m += src;
            c.e -= lam * (r * flux[i + 1][2] - l * flux[i][2]);
        }
        t += dt;
        steps += 1;
    }
    let samples = q
        .iter()
        .enumerate()
        .map(|(i, c)| {
            to_prim(c, g).map(|w| RadialSample {
                r: center(i),
                rho: w.rho,
                u_r: w.u,
                p: w.p,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RadialRun {
        samples,
        steps,
        mass_initial,
        mass_final: mass(&q),
    })
}

/// Reference profile `(r, rho, u_r, p)` at `problem.t_end` on `n_fine`
/// cells. At least 4000 cells are required.
pub fn radial_reference_1d(
    problem: &RadialProblem,
    n_fine: usize,
) -> Result<Vec<RadialSample>, OracleError> {
    if n_fine < 4000 {
        return Err(OracleError::InvalidArgument(format!(
            "reference grids need at least 4000 cells, got {n_fine}"
        )));
    }
    Ok(solve_radial(problem, n_fine)?.samples)
}

/// Linear interpolation of a sampled profile at radius `r` (clamped).
pub fn interpolate(samples: &[RadialSample], r: f64) -> RadialSample {
    let k = samples.partition_point(|s| s.r < r);
    if k == 0 {
        return samples[0];
    }
    if k == samples.len() {
        return samples[k - 1];
    }
    let (a, b) = (&samples[k - 1], &samples[k]);
    let t = (r - a.r) / (b.r - a.r);
    let mix = |x: f64, y: f64| x + t * (y - x);
    RadialSample {
        r,
        rho: mix(a.rho, b.rho),
        u_r: mix(a.u_r, b.u_r),
        p: mix(a.p, b.p),
    }
}
