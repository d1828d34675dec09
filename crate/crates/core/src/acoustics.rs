//! Linear acoustics `u_t + p_x / eps^2 = 0`, `v_t + p_y / eps^2 = 0`,
//! `p_t + c^2 (u_x + v_y) = 0` discretized with the dimensionally split
//! Riemann-solver scheme and its stationarity-preserving multi-dimensional
//! counterpart, plus the von Neumann analysis of the latter.

use nalgebra::{Matrix3, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::euler::Variant;
use crate::grid::{Axis, Boundary};
use crate::stencil::{diff_wide, second_diff, second_sum, CellScalarField};

/// Velocity and pressure perturbations on a padded cell grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticState {
    pub u: CellScalarField,
    pub v: CellScalarField,
    pub p: CellScalarField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticParams {
    pub c: f64,
    pub eps: f64,
    pub dx: f64,
    pub dy: f64,
    pub bc_x: Boundary,
    pub bc_y: Boundary,
}

impl AcousticParams {
    pub fn new(c: f64, eps: f64, dx: f64, dy: f64, bc: Boundary) -> Result<Self> {
        if !(c > 0.0 && eps > 0.0 && dx > 0.0 && dy > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "acoustics needs c, eps, dx, dy > 0 (c = {c}, eps = {eps}, dx = {dx}, dy = {dy})"
            )));
        }
        Ok(Self {
            c,
            eps,
            dx,
            dy,
            bc_x: bc,
            bc_y: bc,
        })
    }

    /// Largest stable step of the multi-dimensional scheme for `cfl = 1`
    /// scaled by `cfl`: `dt = cfl min(dx, dy) eps / c`.
    pub fn time_step(&self, cfl: f64) -> f64 {
        cfl * self.dx.min(self.dy) * self.eps / self.c
    }
}

impl AcousticState {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            u: CellScalarField::zeros(nx, ny),
            v: CellScalarField::zeros(nx, ny),
            p: CellScalarField::zeros(nx, ny),
        }
    }

    /// Evaluates `f(i, j) -> (u, v, p)` on interior cells and fills ghosts.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        params: &AcousticParams,
        f: impl Fn(isize, isize) -> (f64, f64, f64),
    ) -> Self {
        let mut s = Self::zeros(nx, ny);
        for j in 0..ny as isize {
            for i in 0..nx as isize {
                let (u, v, p) = f(i, j);
                s.u.set(i, j, u);
                s.v.set(i, j, v);
                s.p.set(i, j, p);
            }
        }
        s.fill_ghosts(params);
        s
    }

    pub fn nx(&self) -> usize {
        self.u.nx()
    }

    pub fn ny(&self) -> usize {
        self.u.ny()
    }

    pub fn fill_ghosts(&mut self, params: &AcousticParams) {
        self.u.fill_ghosts(params.bc_x, params.bc_y, Some(Axis::X));
        self.v.fill_ghosts(params.bc_x, params.bc_y, Some(Axis::Y));
        self.p.fill_ghosts(params.bc_x, params.bc_y, None);
    }

    /// `self + a * other` on interior cells, ghosts refilled.
    pub fn axpy(&self, a: f64, other: &Self, params: &AcousticParams) -> Self {
        let mut out = Self {
            u: self.u.combine(1.0, &other.u, a),
            v: self.v.combine(1.0, &other.v, a),
            p: self.p.combine(1.0, &other.p, a),
        };
        out.fill_ghosts(params);
        out
    }

    pub fn max_abs_interior(&self) -> f64 {
        self.u
            .max_abs_interior()
            .max(self.v.max_abs_interior())
            .max(self.p.max_abs_interior())
    }
}

fn cell_map(nx: usize, ny: usize, f: impl Fn(isize, isize) -> f64) -> CellScalarField {
    let mut out = CellScalarField::zeros(nx, ny);
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            out.set(i, j, f(i, j));
        }
    }
    out
}

/// Time derivative of the dimensionally split scheme (central pressure
/// gradient plus one-dimensional upwind diffusion along each axis).
pub fn acoustic_rhs_split(s: &AcousticState, prm: &AcousticParams) -> AcousticState {
    let (nx, ny) = (s.nx(), s.ny());
    let (dx, dy, e2, ce, c2) = (
        prm.dx,
        prm.dy,
        prm.eps * prm.eps,
        prm.c / prm.eps,
        prm.c * prm.c,
    );
    let px = diff_wide(&s.p, Axis::X);
    let py = diff_wide(&s.p, Axis::Y);
    let ux = diff_wide(&s.u, Axis::X);
    let vy = diff_wide(&s.v, Axis::Y);
    let uxx = second_diff(&s.u, Axis::X);
    let vyy = second_diff(&s.v, Axis::Y);
    let pxx = second_diff(&s.p, Axis::X);
    let pyy = second_diff(&s.p, Axis::Y);
    AcousticState {
        u: cell_map(nx, ny, |i, j| {
            -px.get(i, j) / (2.0 * dx * e2) + ce * uxx.get(i, j) / (2.0 * dx)
        }),
        v: cell_map(nx, ny, |i, j| {
            -py.get(i, j) / (2.0 * dy * e2) + ce * vyy.get(i, j) / (2.0 * dy)
        }),
        p: cell_map(nx, ny, |i, j| {
            -c2 * (ux.get(i, j) / (2.0 * dx) + vy.get(i, j) / (2.0 * dy))
                + ce * (pxx.get(i, j) / (2.0 * dx) + pyy.get(i, j) / (2.0 * dy))
        }),
    }
}

/// Time derivative of the multi-dimensional scheme: every difference is
/// averaged transversally with weights (1, 2, 1) and the velocity diffusion
/// couples both components through the mixed difference `[[q]_{i+-1}]_{j+-1}`.
pub fn acoustic_rhs_multid(s: &AcousticState, prm: &AcousticParams) -> AcousticState {
    let (nx, ny) = (s.nx(), s.ny());
    let (dx, dy, e2, ce, c2) = (
        prm.dx,
        prm.dy,
        prm.eps * prm.eps,
        prm.c / prm.eps,
        prm.c * prm.c,
    );
    use Axis::{X, Y};
    // pressure gradients {{[p]_{i+-1}}}_{j+-1/2} and [{{p}}_{i+-1/2}]_{j+-1}
    let px = second_sum(&diff_wide(&s.p, X), Y);
    let py = diff_wide(&second_sum(&s.p, X), Y);
    // divergence pieces
    let ux = second_sum(&diff_wide(&s.u, X), Y);
    let vy = diff_wide(&second_sum(&s.v, X), Y);
    // diffusion
    let uxx = second_sum(&second_diff(&s.u, X), Y);
    let uxy = diff_wide(&diff_wide(&s.u, X), Y);
    let vxy = diff_wide(&diff_wide(&s.v, X), Y);
    let vyy = second_diff(&second_sum(&s.v, X), Y);
    let pxx = second_sum(&second_diff(&s.p, X), Y);
    let pyy = second_diff(&second_sum(&s.p, X), Y);
    AcousticState {
        u: cell_map(nx, ny, |i, j| {
            -px.get(i, j) / (8.0 * dx * e2)
                + ce * (uxx.get(i, j) / (8.0 * dx) + vxy.get(i, j) / (8.0 * dy))
        }),
        v: cell_map(nx, ny, |i, j| {
            -py.get(i, j) / (8.0 * dy * e2)
                + ce * (uxy.get(i, j) / (8.0 * dx) + vyy.get(i, j) / (8.0 * dy))
        }),
        p: cell_map(nx, ny, |i, j| {
            -c2 * (ux.get(i, j) / (8.0 * dx) + vy.get(i, j) / (8.0 * dy))
                + ce * (pxx.get(i, j) / (8.0 * dx) + pyy.get(i, j) / (8.0 * dy))
        }),
    }
}

pub fn acoustic_rhs(s: &AcousticState, prm: &AcousticParams, variant: Variant) -> AcousticState {
    match variant {
        Variant::Split => acoustic_rhs_split(s, prm),
        Variant::Multid => acoustic_rhs_multid(s, prm),
    }
}

/// One forward Euler step; ghosts of the result are filled.
pub fn acoustic_step(
    s: &AcousticState,
    prm: &AcousticParams,
    dt: f64,
    variant: Variant,
) -> AcousticState {
    s.axpy(dt, &acoustic_rhs(s, prm, variant), prm)
}

/// Fourier mode `(beta_x, beta_y)` of the multi-dimensional scheme with the
/// resulting eigenvalues of the amplification matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationProbe {
    pub beta_x: f64,
    pub beta_y: f64,
    pub dt: f64,
    pub eigenvalues: [Complex64; 3],
    pub spectral_radius: f64,
}

type CMat = Matrix3<Complex64>;

fn real_mat(m: [[f64; 3]; 3]) -> CMat {
    CMat::from_fn(|r, c| Complex64::new(m[r][c], 0.0))
}

/// Symbol `f D` of the multi-dimensional scheme in the symmetrised variables
/// `(u, v, p / (c eps))`, so that `d/dt q_hat = -(f D) q_hat`.
///
/// Written as `f D = [(1+t_x)(1+t_y) I - S_x (t_x-1)(1+t_y) - S_y (t_y-1)(1+t_x)] M`
/// with `D = (1+t_x)(1+t_y) M`, which stays finite where `t_x = -1` or
/// `t_y = -1` (the factors `1/(1+t)` of `f` cancel).
pub fn evolution_symbol(beta_x: f64, beta_y: f64, prm: &AcousticParams) -> CMat {
    let a = prm.c / prm.eps;
    let jx = real_mat([[0.0, 0.0, a], [0.0, 0.0, 0.0], [a, 0.0, 0.0]]);
    let jy = real_mat([[0.0, 0.0, 0.0], [0.0, 0.0, a], [0.0, a, 0.0]]);
    let sx = jx / Complex64::new(a, 0.0);
    let sy = jy / Complex64::new(a, 0.0);
    let tx = Complex64::from_polar(1.0, beta_x);
    let ty = Complex64::from_polar(1.0, beta_y);
    let one = Complex64::new(1.0, 0.0);
    let m = (jx * ((tx - one) * (one + ty) / prm.dx) + jy * ((ty - one) * (one + tx) / prm.dy))
        / (8.0 * tx * ty);
    let f_scaled = CMat::identity() * ((one + tx) * (one + ty))
        - sx * ((tx - one) * (one + ty))
        - sy * ((ty - one) * (one + tx));
    f_scaled * m
}

/// Eigenvalues of a complex 3x3 matrix via the Schur decomposition.
fn eigenvalues3(m: &CMat) -> Result<[Complex64; 3]> {
    let schur = Schur::try_new(*m, 1e-15, 10_000)
        .ok_or_else(|| Error::InvalidArgument("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok([t[(0, 0)], t[(1, 1)], t[(2, 2)]])
}

/// Amplification matrix `1 - dt f D` of forward Euler with
/// `dt = cfl min(dx, dy) eps / c`.
pub fn amplification_matrix(
    beta_x: f64,
    beta_y: f64,
    prm: &AcousticParams,
    cfl: f64,
) -> Result<AmplificationProbe> {
    if !(beta_x.abs() <= std::f64::consts::PI + 1e-12
        && beta_y.abs() <= std::f64::consts::PI + 1e-12)
    {
        return Err(Error::InvalidArgument(format!(
            "wavenumbers must lie in [-pi, pi], got ({beta_x}, {beta_y})"
        )));
    }
    let dt = prm.time_step(cfl);
    let a = CMat::identity() - evolution_symbol(beta_x, beta_y, prm) * Complex64::new(dt, 0.0);
    let eigenvalues = eigenvalues3(&a)?;
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(AmplificationProbe {
        beta_x,
        beta_y,
        dt,
        eigenvalues,
        spectral_radius,
    })
}

/// `n` equidistant points covering `[-pi, pi]` inclusively.
pub fn beta_grid(n: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|k| -PI + 2.0 * PI * k as f64 / (n - 1) as f64)
        .collect()
}

/// Spectral radii on the `n x n` grid of [`beta_grid`].
pub fn stability_scan(n: usize, prm: &AcousticParams, cfl: f64) -> Result<Vec<AmplificationProbe>> {
    let betas = beta_grid(n);
    let mut out = Vec::with_capacity(n * n);
    for &by in &betas {
        for &bx in &betas {
            out.push(amplification_matrix(bx, by, prm, cfl)?);
        }
    }
    Ok(out)
}

/// Largest admissible `c dt / dx` for the mode `(beta_x, beta_y)` on a
/// square grid, `4 / (3 + cos bx + cos by - cos bx cos by)`; `+inf` where
/// the denominator vanishes (`bx = by = +-pi`).
pub fn stability_bound_f(beta_x: f64, beta_y: f64) -> f64 {
    let (cx, cy) = (beta_x.cos(), beta_y.cos());
    let den = 3.0 + cx + cy - cx * cy;
    if den <= 1e-14 {
        f64::INFINITY
    } else {
        4.0 / den
    }
}
