//! Bracket/brace finite-difference calculus on Cartesian cell arrays.
//!
//! Along one axis, with `q_i` a cell value:
//!
//! | operator | value | location |
//! |---|---|---|
//! | [`diff_half`] `[q]_{i+1/2}` | `q_{i+1} - q_i` | face `i+1/2` |
//! | [`sum_half`] `{q}_{i+1/2}` | `q_{i+1} + q_i` | face `i+1/2` |
//! | [`diff_wide`] `[q]_{i+-1}` | `q_{i+1} - q_{i-1}` | cell `i` |
//! | [`second_diff`] `[[q]]_{i+-1/2}` | `q_{i+1} - 2 q_i + q_{i-1}` | cell `i` |
//! | [`second_sum`] `{{q}}_{i+-1/2}` | `q_{i+1} + 2 q_i + q_{i-1}` | cell `i` |
//!
//! Face results are stored at the index of the lower cell, so operators
//! compose across axes: `sum_half(&diff_half(&u, X), Y)` at `(i, j)` is the
//! vertex value `{[u]_{i+1/2}}_{j+1/2}`. Every array tracks the index range on
//! which it holds data; reading outside it panics.

use std::ops::Range;

use crate::grid::{Axis, Boundary, ConservedState, Field, GHOST};

const G: isize = GHOST as isize;

/// Scalar array aligned with the padded cell layout of a [`Field`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellScalarField {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
    valid_i: Range<isize>,
    valid_j: Range<isize>,
}

impl CellScalarField {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            data: vec![0.0; (nx + 2 * GHOST) * (ny + 2 * GHOST)],
            valid_i: -G..nx as isize + G,
            valid_j: -G..ny as isize + G,
        }
    }

    /// Evaluates `f` on every padded cell, halo included.
    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(isize, isize) -> f64) -> Self {
        let mut out = Self::zeros(nx, ny);
        for j in -G..ny as isize + G {
            for i in -G..nx as isize + G {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    pub fn from_field(field: &Field, f: impl Fn(&ConservedState) -> f64) -> Self {
        let s = field.spec();
        Self::from_fn(s.nx, s.ny, |i, j| f(&field.get(i, j)))
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn valid(&self) -> (Range<isize>, Range<isize>) {
        (self.valid_i.clone(), self.valid_j.clone())
    }

    #[inline]
    fn index(&self, i: isize, j: isize) -> usize {
        ((j + G) as usize) * (self.nx + 2 * GHOST) + (i + G) as usize
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> f64 {
        assert!(
            self.valid_i.contains(&i) && self.valid_j.contains(&j),
            "stencil read at ({i}, {j}) outside valid range {:?} x {:?}",
            self.valid_i,
            self.valid_j
        );
        self.data[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, value: f64) {
        let k = self.index(i, j);
        self.data[k] = value;
    }

    /// Largest absolute value over interior cells `[0, nx) x [0, ny)`.
    pub fn max_abs_interior(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.ny as isize {
            for i in 0..self.nx as isize {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    /// Elementwise `a * self + b * other` on the common valid range.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let vi =
            self.valid_i.start.max(other.valid_i.start)..self.valid_i.end.min(other.valid_i.end);
        let vj =
            self.valid_j.start.max(other.valid_j.start)..self.valid_j.end.min(other.valid_j.end);
        let mut out = Self::zeros(self.nx, self.ny);
        for j in vj.clone() {
            for i in vi.clone() {
                out.set(i, j, a * self.get(i, j) + b * other.get(i, j));
            }
        }
        out.valid_i = vi;
        out.valid_j = vj;
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= a);
        out
    }

    /// Refills the halo from the interior. `negate_on_wall` flips the sign of
    /// the reflected copy across wall boundaries of the given axis (normal
    /// velocity components).
    pub fn fill_ghosts(&mut self, bc_x: Boundary, bc_y: Boundary, negate_on_wall: Option<Axis>) {
        let nx = self.nx as isize;
        let ny = self.ny as isize;
        let sx = if bc_x == Boundary::Wall && negate_on_wall == Some(Axis::X) {
            -1.0
        } else {
            1.0
        };
        let sy = if bc_y == Boundary::Wall && negate_on_wall == Some(Axis::Y) {
            -1.0
        } else {
            1.0
        };
        self.valid_i = -G..nx + G;
        self.valid_j = -G..ny + G;
        for j in 0..ny {
            for k in 1..=G {
                let (lo, hi) = ghost_sources(bc_x, k, nx);
                let (a, b) = (self.get(lo, j), self.get(hi, j));
                self.set(-k, j, sx * a);
                self.set(nx - 1 + k, j, sx * b);
            }
        }
        for i in -G..nx + G {
            for k in 1..=G {
                let (lo, hi) = ghost_sources(bc_y, k, ny);
                let (a, b) = (self.get(i, lo), self.get(i, hi));
                self.set(i, -k, sy * a);
                self.set(i, ny - 1 + k, sy * b);
            }
        }
    }
}

fn ghost_sources(bc: Boundary, k: isize, n: isize) -> (isize, isize) {
    match bc {
        Boundary::Periodic => (n - k, k - 1),
        Boundary::ZeroGradient => (0, n - 1),
        Boundary::Wall => (k - 1, n - k),
    }
}

/// Applies a three-point kernel `f(q_{-1}, q_0, q_{+1})` along `axis`. The
/// result is valid where the offsets `lo..=hi` are readable.
fn along(
    q: &CellScalarField,
    axis: Axis,
    lo: isize,
    hi: isize,
    f: impl Fn(f64, f64, f64) -> f64,
) -> CellScalarField {
    let mut out = CellScalarField::zeros(q.nx, q.ny);
    let (mut vi, mut vj) = q.valid();
    let (di, dj) = match axis {
        Axis::X => {
            vi = vi.start - lo..vi.end - hi;
            (1, 0)
        }
        Axis::Y => {
            vj = vj.start - lo..vj.end - hi;
            (0, 1)
        }
    };
    let read = |i: isize, j: isize, k: isize| {
        if k < lo || k > hi {
            0.0
        } else {
            q.get(i + k * di, j + k * dj)
        }
    };
    for j in vj.clone() {
        for i in vi.clone() {
            out.set(i, j, f(read(i, j, -1), read(i, j, 0), read(i, j, 1)));
        }
    }
    out.valid_i = vi;
    out.valid_j = vj;
    out
}

/// `[q]_{i+1/2} = q_{i+1} - q_i`, stored at `i`.
pub fn diff_half(q: &CellScalarField, axis: Axis) -> CellScalarField {
    along(q, axis, 0, 1, |_, c, r| r - c)
}

/// `{q}_{i+1/2} = q_{i+1} + q_i`, stored at `i`.
pub fn sum_half(q: &CellScalarField, axis: Axis) -> CellScalarField {
    along(q, axis, 0, 1, |_, c, r| r + c)
}

/// `[q]_{i+-1} = q_{i+1} - q_{i-1}`.
pub fn diff_wide(q: &CellScalarField, axis: Axis) -> CellScalarField {
    along(q, axis, -1, 1, |l, _, r| r - l)
}

/// `[[q]]_{i+-1/2} = q_{i+1} - 2 q_i + q_{i-1}`.
pub fn second_diff(q: &CellScalarField, axis: Axis) -> CellScalarField {
    along(q, axis, -1, 1, |l, c, r| (r + l) - 2.0 * c)
}

/// `{{q}}_{i+-1/2} = q_{i+1} + 2 q_i + q_{i-1}`.
pub fn second_sum(q: &CellScalarField, axis: Axis) -> CellScalarField {
    along(q, axis, -1, 1, |l, c, r| (r + l) + 2.0 * c)
}

/// Difference of face values `[f]_{i+-1/2} = f_{i+1/2} - f_{i-1/2}` for a
/// face array stored at lower-cell indices; the result is cell-centered.
pub fn face_diff(f: &CellScalarField, axis: Axis) -> CellScalarField {
    along(f, axis, -1, 0, |l, c, _| c - l)
}

/// Vertex-centered array, `(nx+1) x (ny+1)` corners `(i+1/2, j+1/2)` with
/// `i in -1..nx`, `j in -1..ny`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexScalarField {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl VertexScalarField {
    /// Value at corner `(i+1/2, j+1/2)`.
    #[inline]
    pub fn get(&self, i: isize, j: isize) -> f64 {
        assert!(i >= -1 && i < self.nx as isize && j >= -1 && j < self.ny as isize);
        self.data[((j + 1) as usize) * (self.nx + 1) + (i + 1) as usize]
    }

    pub fn extents(&self) -> (usize, usize) {
        (self.nx + 1, self.ny + 1)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// The vertex-centered 9-point divergence
/// `D_{i+1/2,j+1/2} = {[u]_{i+1/2}}_{j+1/2} / (2 dx) + [{v}_{i+1/2}]_{j+1/2} / (2 dy)`.
pub fn discrete_divergence(
    u: &CellScalarField,
    v: &CellScalarField,
    dx: f64,
    dy: f64,
) -> VertexScalarField {
    let du = sum_half(&diff_half(u, Axis::X), Axis::Y);
    let dv = diff_half(&sum_half(v, Axis::X), Axis::Y);
    let (nx, ny) = (u.nx, u.ny);
    let mut data = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in -1..ny as isize {
        for i in -1..nx as isize {
            data.push(du.get(i, j) / (2.0 * dx) + dv.get(i, j) / (2.0 * dy));
        }
    }
    VertexScalarField { nx, ny, data }
}

/// Cell-centered `[u]_{i+-1} / (2 dx) + [v]_{j+-1} / (2 dy)`.
pub fn central_divergence(
    u: &CellScalarField,
    v: &CellScalarField,
    dx: f64,
    dy: f64,
) -> CellScalarField {
    diff_wide(u, Axis::X).scaled(0.5 / dx).combine(
        1.0,
        &diff_wide(v, Axis::Y).scaled(0.5 / dy),
        1.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(nx: usize, ny: usize, seed: u64) -> CellScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CellScalarField::from_fn(nx, ny, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn constant_second_difference_of_squares() {
        let q = CellScalarField::from_fn(6, 4, |i, _| (i * i) as f64);
        let d2 = second_diff(&q, Axis::X);
        let (vi, vj) = d2.valid();
        for j in vj {
            for i in vi.clone() {
                assert_eq!(d2.get(i, j), 2.0);
            }
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let q = CellScalarField::from_fn(5, 5, |_, _| 3.25);
        for axis in [Axis::X, Axis::Y] {
            assert_eq!(diff_half(&q, axis).max_abs_interior(), 0.0);
            assert_eq!(diff_wide(&q, axis).max_abs_interior(), 0.0);
            assert_eq!(second_diff(&q, axis).max_abs_interior(), 0.0);
            assert_eq!(sum_half(&q, axis).get(1, 1), 6.5);
            assert_eq!(second_sum(&q, axis).get(1, 1), 13.0);
        }
    }

    #[test]
    fn brace_of_bracket_is_wide_difference() {
        for seed in 0..100 {
            let q = random_field(7, 5, seed);
            for axis in [Axis::X, Axis::Y] {
                // {[q]}_{i+-1/2} = [q]_{i+1/2} + [q]_{i-1/2}
                let faces = diff_half(&q, axis);
                let wide = diff_wide(&q, axis);
                let (vi, vj) = wide.valid();
                for j in vj {
                    for i in vi.clone() {
                        let (pi, pj) = if axis == Axis::X {
                            (i - 1, j)
                        } else {
                            (i, j - 1)
                        };
                        let brace = faces.get(i, j) + faces.get(pi, pj);
                        assert_eq!(brace, wide.get(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn combined_notation_examples() {
        let q = random_field(6, 6, 7);
        let v = sum_half(&diff_half(&q, Axis::X), Axis::Y);
        let (i, j) = (2, 3);
        let expected = q.get(i + 1, j + 1) - q.get(i, j + 1) + q.get(i + 1, j) - q.get(i, j);
        assert!((v.get(i, j) - expected).abs() < 1e-15);

        let w = diff_wide(&diff_wide(&q, Axis::X), Axis::Y);
        let expected =
            q.get(i + 1, j + 1) - q.get(i - 1, j + 1) - q.get(i + 1, j - 1) + q.get(i - 1, j - 1);
        assert!((w.get(i, j) - expected).abs() < 1e-15);

        let s = second_diff(&q, Axis::Y);
        assert!(
            (s.get(i, j) - (q.get(i, j + 1) - 2.0 * q.get(i, j) + q.get(i, j - 1))).abs() < 1e-15
        );
    }

    #[test]
    #[should_panic(expected = "outside valid range")]
    fn composed_operator_rejects_reads_past_its_stencil() {
        let q = random_field(4, 4, 1);
        let d = second_diff(&second_diff(&q, Axis::X), Axis::X);
        // two second differences consume both halo layers on each side
        d.get(-1, 0);
    }

    #[test]
    fn divergence_of_constants_and_shears_vanishes() {
        let (nx, ny, dx, dy) = (8, 6, 0.1, 0.2);
        let c = CellScalarField::from_fn(nx, ny, |_, _| 0.7);
        assert_eq!(discrete_divergence(&c, &c, dx, dy).max_abs(), 0.0);

        let u = CellScalarField::from_fn(nx, ny, |_, j| (j as f64 * 0.37).sin());
        let v = CellScalarField::from_fn(nx, ny, |i, _| (i as f64 * 1.3).cos());
        assert_eq!(discrete_divergence(&u, &v, dx, dy).max_abs(), 0.0);
    }

    #[test]
    fn divergence_of_linear_field_is_one() {
        let (nx, ny, dx, dy) = (8, 6, 0.1, 0.2);
        let u = CellScalarField::from_fn(nx, ny, |i, _| i as f64 * dx);
        let v = CellScalarField::from_fn(nx, ny, |_, _| 0.0);
        let d = discrete_divergence(&u, &v, dx, dy);
        assert_eq!(d.extents(), (nx + 1, ny + 1));
        for x in d.values() {
            assert!((x - 1.0).abs() < 1e-13);
        }
        let c = central_divergence(&u, &v, dx, dy);
        for j in 0..ny as isize {
            for i in 0..nx as isize {
                assert!((c.get(i, j) - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn central_divergence_is_blind_to_checkerboards() {
        let u = CellScalarField::from_fn(6, 6, |i, j| {
            if (i + j).rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            }
        });
        let v = CellScalarField::zeros(6, 6);
        assert_eq!(central_divergence(&u, &v, 0.1, 0.1).max_abs_interior(), 0.0);
        // column-wise oscillations are invisible to the central form only
        let u =
            CellScalarField::from_fn(6, 6, |i, _| if i.rem_euclid(2) == 0 { 1.0 } else { -1.0 });
        assert_eq!(central_divergence(&u, &v, 0.1, 0.1).max_abs_interior(), 0.0);
        assert!(discrete_divergence(&u, &v, 0.1, 0.1).max_abs() > 1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn operators_are_linear(seed_a in 0u64..1000, seed_b in 1000u64..2000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
                let p = random_field(5, 4, seed_a);
                let q = random_field(5, 4, seed_b);
                let lin = p.combine(a, &q, b);
                type Op = fn(&CellScalarField, Axis) -> CellScalarField;
                let ops: [Op; 5] = [diff_half, sum_half, diff_wide, second_diff, second_sum];
                for op in ops {
                    for axis in [Axis::X, Axis::Y] {
                        let lhs = op(&lin, axis);
                        let rhs = op(&p, axis).combine(a, &op(&q, axis), b);
                        let (vi, vj) = lhs.valid();
                        for j in vj {
                            for i in vi.clone() {
                                prop_assert!((lhs.get(i, j) - rhs.get(i, j)).abs() < 1e-13);
                            }
                        }
                    }
                }
            }

            #[test]
            fn axis_operators_commute(seed in 0u64..1000) {
                let q = random_field(5, 5, seed);
                type Op = fn(&CellScalarField, Axis) -> CellScalarField;
                let ops: [Op; 5] = [diff_half, sum_half, diff_wide, second_diff, second_sum];
                for f in ops {
                    for g in ops {
                        let xy = g(&f(&q, Axis::X), Axis::Y);
                        let yx = f(&g(&q, Axis::Y), Axis::X);
                        let (vi, vj) = xy.valid();
                        for j in vj {
                            for i in vi.clone() {
                                prop_assert!((xy.get(i, j) - yx.get(i, j)).abs() < 1e-14);
                            }
                        }
                    }
                }
            }
        }
    }
}
