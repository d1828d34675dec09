//! Cartesian grid geometry, Euler state representations, the ideal-gas
//! equation of state and ghost-cell boundary handling.
//!
//! All cell arrays in this crate share one padded row-major layout: a grid of
//! `nx x ny` interior cells is stored with [`GHOST`] halo layers on every
//! side, and cell `(i, j)` with `i in -GHOST..nx+GHOST` lives at
//! [`GridSpec::idx`]. Face-centered quantities reuse the same layout, the
//! x-face `i+1/2` being stored at the index of its left cell `i` and the
//! y-face `j+1/2` at the index of its lower cell `j`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Halo width. The 9-point stencils need one layer, the Lagrange-Projection
/// predictor needs star states one face further out.
pub const GHOST: usize = 2;

const G: isize = GHOST as isize;

pub const DEFAULT_GAMMA: f64 = 1.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    ZeroGradient,
    /// Reflecting wall: mirror copy with the normal momentum negated.
    Wall,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "zero-gradient" => Ok(Boundary::ZeroGradient),
            "wall" => Ok(Boundary::Wall),
            other => Err(Error::InvalidArgument(format!(
                "unknown boundary '{other}' (expected periodic, zero-gradient or wall)"
            ))),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::ZeroGradient => "zero-gradient",
            Boundary::Wall => "wall",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
    pub bc_x: Boundary,
    pub bc_y: Boundary,
}

impl GridSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        x0: f64,
        y0: f64,
        bc_x: Boundary,
        bc_y: Boundary,
    ) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 3x3 cells, got {nx}x{ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cell widths must be positive, got dx = {dx}, dy = {dy}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            x0,
            y0,
            bc_x,
            bc_y,
        })
    }

    /// Grid covering `[x_min, x_max] x [y_min, y_max]` with the same boundary
    /// kind on both axes.
    pub fn covering(
        nx: usize,
        ny: usize,
        (x_min, x_max): (f64, f64),
        (y_min, y_max): (f64, f64),
        bc: Boundary,
    ) -> Result<Self> {
        Self::new(
            nx,
            ny,
            (x_max - x_min) / nx as f64,
            (y_max - y_min) / ny as f64,
            x_min,
            y_min,
            bc,
            bc,
        )
    }

    pub fn with_boundaries(mut self, bc_x: Boundary, bc_y: Boundary) -> Self {
        self.bc_x = bc_x;
        self.bc_y = bc_y;
        self
    }

    /// Row length of the padded layout.
    #[inline]
    pub fn stride(&self) -> usize {
        self.nx + 2 * GHOST
    }

    #[inline]
    pub fn padded_len(&self) -> usize {
        self.stride() * (self.ny + 2 * GHOST)
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Index of cell `(i, j)` in the padded layout. Valid for
    /// `i in -GHOST..nx+GHOST`, `j in -GHOST..ny+GHOST`.
    #[inline]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        debug_assert!(
            i >= -G && i < self.nx as isize + G && j >= -G && j < self.ny as isize + G,
            "cell ({i}, {j}) outside padded {}x{} grid",
            self.nx,
            self.ny
        );
        ((j + G) as usize) * self.stride() + (i + G) as usize
    }

    pub fn cell_center(&self, i: isize, j: isize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.dx,
            self.y0 + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Offset of the cell center from `(xc, yc)`.
    ///
    /// Computed from the integer distance to the grid midline so that cells
    /// mirrored about the domain center get offsets of exactly opposite sign.
    pub fn offset_from(&self, i: isize, j: isize, xc: f64, yc: f64) -> (f64, f64) {
        let shift_x = self.x0 + 0.5 * self.nx as f64 * self.dx - xc;
        let shift_y = self.y0 + 0.5 * self.ny as f64 * self.dy - yc;
        let kx = (2 * i + 1 - self.nx as isize) as f64;
        let ky = (2 * j + 1 - self.ny as isize) as f64;
        (
            kx * (0.5 * self.dx) + shift_x,
            ky * (0.5 * self.dy) + shift_y,
        )
    }

    pub fn extent(&self) -> ((f64, f64), (f64, f64)) {
        (
            (self.x0, self.x0 + self.nx as f64 * self.dx),
            (self.y0, self.y0 + self.ny as f64 * self.dy),
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        (0..self.ny as isize).flat_map(move |j| (0..self.nx as isize).map(move |i| (i, j)))
    }
}

/// Conserved variables `(rho, rho u, rho v, e)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedState {
    pub rho: f64,
    pub rho_u: f64,
    pub rho_v: f64,
    pub e: f64,
}

/// Primitive variables `(rho, u, v, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl ConservedState {
    pub const fn new(rho: f64, rho_u: f64, rho_v: f64, e: f64) -> Self {
        Self {
            rho,
            rho_u,
            rho_v,
            e,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.rho_u, self.rho_v, self.e]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.rho - other.rho)
            .abs()
            .max((self.rho_u - other.rho_u).abs())
            .max((self.rho_v - other.rho_v).abs())
            .max((self.e - other.e).abs())
    }
}

impl Add for ConservedState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.rho + o.rho,
            self.rho_u + o.rho_u,
            self.rho_v + o.rho_v,
            self.e + o.e,
        )
    }
}

impl Sub for ConservedState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.rho - o.rho,
            self.rho_u - o.rho_u,
            self.rho_v - o.rho_v,
            self.e - o.e,
        )
    }
}

impl Mul<f64> for ConservedState {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.rho * s, self.rho_u * s, self.rho_v * s, self.e * s)
    }
}

impl PrimitiveState {
    pub const fn new(rho: f64, u: f64, v: f64, p: f64) -> Self {
        Self { rho, u, v, p }
    }

    pub fn is_valid(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0 && self.u.is_finite() && self.v.is_finite()
    }
}

/// Inverts `e = p/(gamma-1) + rho |v|^2 / 2`.
#[inline]
pub fn cons_to_prim(q: &ConservedState, gamma: f64) -> Result<PrimitiveState> {
    if !(q.rho > 0.0) {
        return Err(Error::InvalidState {
            cell: None,
            rho: q.rho,
            p: f64::NAN,
        });
    }
    let u = q.rho_u / q.rho;
    let v = q.rho_v / q.rho;
    let p = (gamma - 1.0) * (q.e - 0.5 * (q.rho_u * u + q.rho_v * v));
    // also rejects NaN
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidState {
            cell: None,
            rho: q.rho,
            p,
        });
    }
    Ok(PrimitiveState::new(q.rho, u, v, p))
}

#[inline]
pub fn prim_to_cons(w: &PrimitiveState, gamma: f64) -> ConservedState {
    let rho_u = w.rho * w.u;
    let rho_v = w.rho * w.v;
    ConservedState::new(
        w.rho,
        rho_u,
        rho_v,
        w.p / (gamma - 1.0) + 0.5 * (rho_u * w.u + rho_v * w.v),
    )
}

/// Sound speed `sqrt(gamma p / rho)` and Mach number `|v| / c`.
#[inline]
pub fn sound_speed_and_mach(w: &PrimitiveState, gamma: f64) -> (f64, f64) {
    let c = (gamma * w.p / w.rho).sqrt();
    (c, (w.u * w.u + w.v * w.v).sqrt() / c)
}

/// Cell-centered conserved states on a padded grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    data: Vec<ConservedState>,
}

impl Field {
    pub fn new(spec: GridSpec) -> Self {
        let data = vec![ConservedState::default(); spec.padded_len()];
        Self { spec, data }
    }

    /// Builds a field by evaluating `init(x, y)` at every interior cell
    /// center, then fills the ghosts.
    pub fn from_primitive_fn(
        spec: GridSpec,
        gamma: f64,
        mut init: impl FnMut(isize, isize) -> PrimitiveState,
    ) -> Self {
        let mut f = Self::new(spec);
        for j in 0..f.spec.ny as isize {
            for i in 0..f.spec.nx as isize {
                let w = init(i, j);
                f.set(i, j, prim_to_cons(&w, gamma));
            }
        }
        f.fill_ghosts();
        f
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> ConservedState {
        self.data[self.spec.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, q: ConservedState) {
        let k = self.spec.idx(i, j);
        self.data[k] = q;
    }

    /// Raw padded storage.
    pub fn data(&self) -> &[ConservedState] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [ConservedState] {
        &mut self.data
    }

    pub fn primitive(&self, i: isize, j: isize, gamma: f64) -> Result<PrimitiveState> {
        cons_to_prim(&self.get(i, j), gamma).map_err(|e| e.at_cell(i, j))
    }

    pub fn interior(&self) -> impl Iterator<Item = (isize, isize, ConservedState)> + '_ {
        self.spec.cells().map(move |(i, j)| (i, j, self.get(i, j)))
    }

    /// Sums of each conserved component over interior cells (not multiplied
    /// by the cell area).
    pub fn totals(&self) -> [f64; 4] {
        let mut s = [0.0; 4];
        for (_, _, q) in self.interior() {
            s[0] += q.rho;
            s[1] += q.rho_u;
            s[2] += q.rho_v;
            s[3] += q.e;
        }
        s
    }

    /// Sums of absolute values of each conserved component; a scale for
    /// relative drift of totals that may vanish.
    pub fn abs_totals(&self) -> [f64; 4] {
        let mut s = [0.0; 4];
        for (_, _, q) in self.interior() {
            s[0] += q.rho.abs();
            s[1] += q.rho_u.abs();
            s[2] += q.rho_v.abs();
            s[3] += q.e.abs();
        }
        s
    }

    /// Largest componentwise difference over interior cells.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.spec.nx, other.spec.nx);
        assert_eq!(self.spec.ny, other.spec.ny);
        self.interior()
            .map(|(i, j, q)| q.max_abs_diff(&other.get(i, j)))
            .fold(0.0, f64::max)
    }

    /// Checks every interior cell and returns the first invalid one.
    pub fn validate(&self, gamma: f64) -> Result<()> {
        for (i, j, _) in self.interior() {
            self.primitive(i, j, gamma)?;
        }
        Ok(())
    }

    pub fn with_ghosts_filled(mut self) -> Self {
        self.fill_ghosts();
        self
    }

    /// Populates the halo from the interior according to the boundary kinds.
    /// The x-halo of interior rows is filled first, then the y-halo of every
    /// column (ghost columns included), so corners are consistent.
    pub fn fill_ghosts(&mut self) {
        let nx = self.spec.nx as isize;
        let ny = self.spec.ny as isize;
        let bc_x = self.spec.bc_x;
        let bc_y = self.spec.bc_y;
        for j in 0..ny {
            for k in 1..=G {
                let (lo_src, hi_src) = ghost_sources(bc_x, k, nx);
                let mut lo = self.get(lo_src, j);
                let mut hi = self.get(hi_src, j);
                if bc_x == Boundary::Wall {
                    lo.rho_u = -lo.rho_u;
                    hi.rho_u = -hi.rho_u;
                }
                self.set(-k, j, lo);
                self.set(nx - 1 + k, j, hi);
            }
        }
        for i in -G..nx + G {
            for k in 1..=G {
                let (lo_src, hi_src) = ghost_sources(bc_y, k, ny);
                let mut lo = self.get(i, lo_src);
                let mut hi = self.get(i, hi_src);
                if bc_y == Boundary::Wall {
                    lo.rho_v = -lo.rho_v;
                    hi.rho_v = -hi.rho_v;
                }
                self.set(i, -k, lo);
                self.set(i, ny - 1 + k, hi);
            }
        }
    }
}

/// Interior source cells for the `k`-th ghost layer (`k >= 1`) on the low and
/// high side of an axis with `n` cells.
#[inline]
fn ghost_sources(bc: Boundary, k: isize, n: isize) -> (isize, isize) {
    match bc {
        Boundary::Periodic => (n - k, k - 1),
        Boundary::ZeroGradient => (0, n - 1),
        Boundary::Wall => (k - 1, n - k),
    }
}
