//! Random velocity fields in the kernel of the vertex divergence on a periodic
//! grid, obtained by dense elimination of the assembled operator.
//!
//! The operator is assembled directly from its definition (corner average of
//! the x-difference of `u` plus corner average of the y-difference of `v`),
//! independently of the solver's stencil code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::OracleError;

/// Largest grid side for which dense elimination is attempted.
pub const MAX_SIDE: usize = 16;

/// Pivot threshold relative to the largest matrix entry.
const PIVOT_TOL: f64 = 1e-10;

/// Periodic cell fields `u`, `v` stored row-major (`j * nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySample {
    pub nx: usize,
    pub ny: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl VelocitySample {
    /// `u` at a periodically wrapped cell index.
    pub fn u_at(&self, i: isize, j: isize) -> f64 {
        self.u[self.wrap(i, j)]
    }

    pub fn v_at(&self, i: isize, j: isize) -> f64 {
        self.v[self.wrap(i, j)]
    }

    fn wrap(&self, i: isize, j: isize) -> usize {
        let i = i.rem_euclid(self.nx as isize) as usize;
        let j = j.rem_euclid(self.ny as isize) as usize;
        j * self.nx + i
    }
}

/// Dense matrix of the vertex divergence acting on `(u, v)` (first the `nx ny`
/// values of `u`, then those of `v`); row `j * nx + i` is the vertex
/// `(i+1/2, j+1/2)`.
pub fn divergence_matrix(nx: usize, ny: usize, dx: f64, dy: f64) -> Vec<Vec<f64>> {
    let n = nx * ny;
    let cell = |i: usize, j: usize| (j % ny) * nx + (i % nx);
    let mut m = vec![vec![0.0; 2 * n]; n];
    for j in 0..ny {
        for i in 0..nx {
            let row = &mut m[cell(i, j)];
            // (u_{i+1,j} - u_{i,j} + u_{i+1,j+1} - u_{i,j+1}) / (2 dx)
            for (ci, cj, s) in [
                (i + 1, j, 1.0),
                (i, j, -1.0),
                (i + 1, j + 1, 1.0),
                (i, j + 1, -1.0),
            ] {
                row[cell(ci, cj)] += s / (2.0 * dx);
            }
            // (v_{i,j+1} + v_{i+1,j+1} - v_{i,j} - v_{i+1,j}) / (2 dy)
            for (ci, cj, s) in [
                (i, j + 1, 1.0),
                (i + 1, j + 1, 1.0),
                (i, j, -1.0),
                (i + 1, j, -1.0),
            ] {
                row[n + cell(ci, cj)] += s / (2.0 * dy);
            }
        }
    }
    m
}

/// Orthonormal-free basis of the null space of `m` (each vector has one free
/// variable set to 1), via reduced row echelon form with partial pivoting.
pub fn null_space(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    let tol = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|k| (k, m[k][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        m.swap(r, best);
        let piv = m[r][c];
        for x in m[r].iter_mut() {
            *x /= piv;
        }
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && row[c] != 0.0 {
                let f = row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
                row[c] = 0.0;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0.0; cols];
            v[free] = 1.0;
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[k][free];
            }
            v
        })
        .collect()
}

/// Applies the vertex divergence to a sample; returns the largest magnitude.
pub fn max_divergence(s: &VelocitySample, dx: f64, dy: f64) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..s.ny as isize {
        for i in 0..s.nx as isize {
            let du = (s.u_at(i + 1, j) - s.u_at(i, j)) + (s.u_at(i + 1, j + 1) - s.u_at(i, j + 1));
            let dv = (s.v_at(i, j + 1) - s.v_at(i, j)) + (s.v_at(i + 1, j + 1) - s.v_at(i + 1, j));
            worst = worst.max((du / (2.0 * dx) + dv / (2.0 * dy)).abs());
        }
    }
    worst
}

/// Dimension of the null space of the periodic vertex divergence.
pub fn null_space_dimension(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<usize, OracleError> {
    check_size(nx, ny)?;
    Ok(null_space(divergence_matrix(nx, ny, dx, dy)).len())
}

fn check_size(nx: usize, ny: usize) -> Result<(), OracleError> {
    if nx < 2 || ny < 2 || nx > MAX_SIDE || ny > MAX_SIDE {
        return Err(OracleError::InvalidArgument(format!(
            "null-space grids must be between 2x2 and {MAX_SIDE}x{MAX_SIDE}, got {nx}x{ny}"
        )));
    }
    Ok(())
}

/// Random discretely divergence-free velocity field: a combination of the
/// null-space basis with coefficients uniform in `[-1, 1]`, normalised to
/// unit max norm, then checked against the operator.
pub fn divergence_nullspace_sample(
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    seed: u64,
) -> Result<VelocitySample, OracleError> {
    check_size(nx, ny)?;
    let basis = null_space(divergence_matrix(nx, ny, dx, dy));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = nx * ny;
    let mut x = vec![0.0; 2 * n];
    for b in &basis {
        let c: f64 = rng.random_range(-1.0..1.0);
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += c * bi;
        }
    }
    let norm = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if norm > 0.0 {
        for xi in x.iter_mut() {
            *xi /= norm;
        }
    }
    let sample = VelocitySample {
        nx,
        ny,
        u: x[..n].to_vec(),
        v: x[n..].to_vec(),
    };
    let residual = max_divergence(&sample, dx, dy) * dx.min(dy);
    if residual > 1e-12 {
        return Err(OracleError::NoConvergence);
    }
    Ok(sample)
}

/// Residual of the projection of `x` onto the span of `basis` (least squares
/// via normal equations solved by elimination).
pub fn projection_residual(basis: &[Vec<f64>], x: &[f64]) -> f64 {
    let k = basis.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let mut g: Vec<Vec<f64>> = (0..k)
        .map(|r| {
            let mut row: Vec<f64> = (0..k).map(|c| dot(&basis[r], &basis[c])).collect();
            row.push(dot(&basis[r], x));
            row
        })
        .collect();
    // Gauss-Jordan on the (SPD) Gram system
    for c in 0..k {
        let best = (c..k)
            .max_by(|&a, &b| g[a][c].abs().total_cmp(&g[b][c].abs()))
            .unwrap_or(c);
        g.swap(c, best);
        let piv = g[c][c];
        for v in g[c].iter_mut() {
            *v /= piv;
        }
        let prow = g[c].clone();
        for (r, row) in g.iter_mut().enumerate() {
            if r != c {
                let f = row[c];
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
    }
    let mut proj = vec![0.0; x.len()];
    for (r, b) in basis.iter().enumerate() {
        let coef = g[r][k];
        for (p, bi) in proj.iter_mut().zip(b) {
            *p += coef * bi;
        }
    }
    proj.iter()
        .zip(x)
        .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()))
}
