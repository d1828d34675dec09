//! Explicit finite-volume schemes for the 2D Euler equations.
//!
//! Both solver families share the acoustic interface states `u*`, `p*`. In
//! the split variants they come from the two cells adjacent to a face; in the
//! multi-dimensional variants they are averaged over the 2x3 block of cells
//! around the face, with the normal velocity jump completed to the vertex
//! divergence (see [`FaceStencil`]).

pub mod lp;
pub mod relax;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{cons_to_prim, Axis, ConservedState, Field, GridSpec, PrimitiveState, GHOST};

pub(crate) const G: isize = GHOST as isize;

/// Grids with at least this many cells are processed row-parallel.
const PARALLEL_MIN_CELLS: usize = 16_384;

/// Default safety factor `K` in `a = K max(rho c)`.
pub const DEFAULT_A_SAFETY: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Dimensionally split: each face sees only its two neighbours.
    Split,
    /// Truly multi-dimensional all-speed extension.
    Multid,
}

/// Primitive variables plus the acoustic impedance `rho c` of one cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PrimCell {
    pub w: PrimitiveState,
    pub rc: f64,
    /// Specific volume `1 / rho`.
    pub tau: f64,
}

/// Primitive variables on every padded cell of a field, plus the largest
/// interior signal speed `max(|u|, |v|) + c`.
#[derive(Debug, Clone)]
pub struct Primitives {
    spec: GridSpec,
    cells: Vec<PrimCell>,
    max_speed: f64,
}

impl Primitives {
    pub fn new(spec: &GridSpec) -> Self {
        Self {
            spec: spec.clone(),
            cells: vec![PrimCell::default(); spec.padded_len()],
            max_speed: f64::NAN,
        }
    }

    /// Converts every padded cell (halo included, ghosts must be filled).
    pub fn compute(field: &Field, gamma: f64) -> Result<Self> {
        let mut p = Self::new(field.spec());
        p.update(field, gamma)?;
        Ok(p)
    }

    pub fn update(&mut self, field: &Field, gamma: f64) -> Result<()> {
        let spec = field.spec();
        debug_assert_eq!(spec.padded_len(), self.cells.len());
        let stride = spec.stride();
        let data = field.data();
        let interior_rows = G as usize..G as usize + spec.ny;
        let interior_cols = G as usize..G as usize + spec.nx;
        let convert = |row: usize, out: &mut [PrimCell]| -> Result<f64> {
            let src = &data[row * stride..(row + 1) * stride];
            for (k, (q, cell)) in src.iter().zip(out.iter_mut()).enumerate() {
                let w = cons_to_prim(q, gamma)
                    .map_err(|e| e.at_cell(k as isize - G, row as isize - G))?;
                *cell = PrimCell {
                    w,
                    rc: (gamma * w.p * w.rho).sqrt(),
                    tau: 1.0 / w.rho,
                };
            }
            if !interior_rows.contains(&row) {
                return Ok(0.0);
            }
            Ok(out[interior_cols.clone()]
                .iter()
                .map(|c| c.w.u.abs().max(c.w.v.abs()) + c.rc * c.tau)
                .fold(0.0, f64::max))
        };
        self.max_speed = if use_parallel(spec) {
            self.cells
                .par_chunks_mut(stride)
                .enumerate()
                .map(|(row, out)| convert(row, out))
                .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?
        } else {
            let mut m = 0.0f64;
            for (row, out) in self.cells.chunks_mut(stride).enumerate() {
                m = m.max(convert(row, out)?);
            }
            m
        };
        Ok(())
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> &PrimCell {
        &self.cells[self.spec.idx(i, j)]
    }

    /// Padded row `j` (cell `i` at [`col`]`(i)`).
    #[inline]
    pub(crate) fn row(&self, j: isize) -> &[PrimCell] {
        let stride = self.spec.stride();
        let r = (j + G) as usize;
        &self.cells[r * stride..(r + 1) * stride]
    }

    /// Largest `max(|u|, |v|) + c` over interior cells at the last update.
    pub fn max_speed(&self) -> f64 {
        self.max_speed
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }
}

pub(crate) fn use_parallel(spec: &GridSpec) -> bool {
    spec.n_cells() >= PARALLEL_MIN_CELLS && rayon::current_num_threads() > 1
}

/// Runs `body(j, row)` for padded rows `j in rows`, where `row` is the slice
/// of `out` holding that grid row. Rows are independent, so the serial and
/// parallel paths produce identical results.
pub(crate) fn for_rows<T: Send>(
    spec: &GridSpec,
    out: &mut [T],
    rows: std::ops::Range<isize>,
    body: impl Fn(isize, &mut [T]) -> Result<()> + Sync,
) -> Result<()> {
    let stride = spec.stride();
    let first = (rows.start + G) as usize;
    let last = (rows.end + G) as usize;
    let chunk = &mut out[first * stride..last * stride];
    if use_parallel(spec) {
        chunk
            .par_chunks_mut(stride)
            .enumerate()
            .try_for_each(|(k, row)| body(rows.start + k as isize, row))
    } else {
        chunk
            .chunks_mut(stride)
            .enumerate()
            .try_for_each(|(k, row)| body(rows.start + k as isize, row))
    }
}

/// Column offset of cell `i` inside a padded row slice.
#[inline]
pub(crate) fn col(i: isize) -> usize {
    (i + G) as usize
}

/// Acoustic interface data in the face-normal frame: weighted averages of
/// pressure and normal velocity, the weighted pressure jump and the normal
/// velocity jump (completed to a divergence in the multi-d variant).
///
/// Star states follow as `u* = un_avg - p_jump / (2a)` and
/// `p* = p_avg - a div_n / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceStencil {
    pub p_avg: f64,
    pub un_avg: f64,
    pub p_jump: f64,
    pub div_n: f64,
}

impl FaceStencil {
    #[inline]
    pub fn u_star(&self, a: f64) -> f64 {
        self.un_avg - self.p_jump / (2.0 * a)
    }

    #[inline]
    pub fn p_star(&self, a: f64) -> f64 {
        self.p_avg - 0.5 * a * self.div_n
    }
}

/// Normal and transverse velocity of a cell with respect to `axis`.
#[inline]
fn nt(w: &PrimitiveState, axis: Axis) -> (f64, f64) {
    match axis {
        Axis::X => (w.u, w.v),
        Axis::Y => (w.v, w.u),
    }
}

/// Two-point interface data `{q}/2`, `[p]`, `[u_n]`.
#[inline]
pub(crate) fn stencil_split(l: &PrimitiveState, r: &PrimitiveState, axis: Axis) -> FaceStencil {
    let (unl, _) = nt(l, axis);
    let (unr, _) = nt(r, axis);
    FaceStencil {
        p_avg: 0.5 * (l.p + r.p),
        un_avg: 0.5 * (unl + unr),
        p_jump: r.p - l.p,
        div_n: unr - unl,
    }
}

/// Nine-point interface data from the left and right cell columns, each given
/// as `[below, at, above]` in the transverse direction. `ratio` is
/// `dx/dy` for x-faces and `dy/dx` for y-faces.
///
/// Sums are grouped as `(q_- + q_+) + 2 q_0` and `q_L + q_R` so mirrored data
/// reproduces mirrored results bit for bit.
#[inline]
pub(crate) fn stencil_multid(
    l: [&PrimitiveState; 3],
    r: [&PrimitiveState; 3],
    axis: Axis,
    ratio: f64,
) -> FaceStencil {
    let n = |w: &PrimitiveState| nt(w, axis).0;
    let t = |w: &PrimitiveState| nt(w, axis).1;
    // {{ {p} }} / 8 and {{ {u_n} }} / 8
    let p_avg = 0.125 * weighted(|k| l[k].p + r[k].p);
    let un_avg = 0.125 * weighted(|k| n(l[k]) + n(r[k]));
    // {{ [p] }} / 4
    let p_jump = 0.25 * weighted(|k| r[k].p - l[k].p);
    // {{ [u_n] }} / 4 + ratio [{u_t}]_{+-1} / 4
    let dn = 0.25 * weighted(|k| n(r[k]) - n(l[k]));
    let dt = 0.25 * ((t(l[2]) + t(r[2])) - (t(l[0]) + t(r[0])));
    FaceStencil {
        p_avg,
        un_avg,
        p_jump,
        div_n: dn + ratio * dt,
    }
}

/// `(f_- + f_+) + 2 f_0` over the transverse offsets `[-1, 0, +1]`.
#[inline(always)]
fn weighted(f: impl Fn(usize) -> f64) -> f64 {
    (f(0) + f(2)) + 2.0 * f(1)
}

/// Interface stencil of the x-face `(i+1/2, j)` or y-face `(i, j+1/2)`.
#[inline]
pub(crate) fn face_stencil(
    prims: &Primitives,
    axis: Axis,
    i: isize,
    j: isize,
    variant: Variant,
) -> FaceStencil {
    let spec = prims.spec();
    match (variant, axis) {
        (Variant::Split, Axis::X) => {
            stencil_split(&prims.get(i, j).w, &prims.get(i + 1, j).w, axis)
        }
        (Variant::Split, Axis::Y) => {
            stencil_split(&prims.get(i, j).w, &prims.get(i, j + 1).w, axis)
        }
        (Variant::Multid, Axis::X) => {
            let l = [
                &prims.get(i, j - 1).w,
                &prims.get(i, j).w,
                &prims.get(i, j + 1).w,
            ];
            let r = [
                &prims.get(i + 1, j - 1).w,
                &prims.get(i + 1, j).w,
                &prims.get(i + 1, j + 1).w,
            ];
            stencil_multid(l, r, axis, spec.dx / spec.dy)
        }
        (Variant::Multid, Axis::Y) => {
            let l = [
                &prims.get(i - 1, j).w,
                &prims.get(i, j).w,
                &prims.get(i + 1, j).w,
            ];
            let r = [
                &prims.get(i - 1, j + 1).w,
                &prims.get(i, j + 1).w,
                &prims.get(i + 1, j + 1).w,
            ];
            stencil_multid(l, r, axis, spec.dy / spec.dx)
        }
    }
}

/// Relaxation speed `K max(rho c)` over the cells feeding a face: the two
/// neighbours for split stars, the 2x3 block for multi-d stars.
#[inline]
pub(crate) fn face_speed(
    prims: &Primitives,
    axis: Axis,
    i: isize,
    j: isize,
    variant: Variant,
    k_safety: f64,
) -> f64 {
    let (di, dj) = match axis {
        Axis::X => (1, 0),
        Axis::Y => (0, 1),
    };
    let mut m = prims.get(i, j).rc.max(prims.get(i + di, j + dj).rc);
    if variant == Variant::Multid {
        // transverse neighbours of both cells
        let (ti, tj) = (dj, di);
        for s in [-1, 1] {
            m = m
                .max(prims.get(i + s * ti, j + s * tj).rc)
                .max(prims.get(i + di + s * ti, j + dj + s * tj).rc);
        }
    }
    k_safety * m
}

/// Relaxation speeds on x-faces (stored at the left cell index) and y-faces
/// (stored at the lower cell index), over the padded layout.
#[derive(Debug, Clone)]
pub struct FaceSpeeds {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl FaceSpeeds {
    /// `K max(rho c)` on every face touching cells `-1..=n` in both
    /// directions (the ring the Lagrange-Projection predictor needs).
    pub fn from_primitives(prims: &Primitives, variant: Variant, k_safety: f64) -> Self {
        let spec = prims.spec();
        let (nx, ny) = (spec.nx as isize, spec.ny as isize);
        let mut x = vec![f64::NAN; spec.padded_len()];
        let mut y = vec![f64::NAN; spec.padded_len()];
        for j in -1..=ny {
            for i in -2..=nx {
                x[spec.idx(i, j)] = face_speed(prims, Axis::X, i, j, variant, k_safety);
            }
        }
        for j in -2..=ny {
            for i in -1..=nx {
                y[spec.idx(i, j)] = face_speed(prims, Axis::Y, i, j, variant, k_safety);
            }
        }
        Self { x, y }
    }

    /// A single speed on every face.
    pub fn uniform(spec: &GridSpec, a: f64) -> Self {
        Self {
            x: vec![a; spec.padded_len()],
            y: vec![a; spec.padded_len()],
        }
    }
}

/// Interface stencil together with the relaxation speed of its face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FaceData {
    pub s: FaceStencil,
    pub a: f64,
}

/// Transverse `(q_- + q_+) + 2 q_0` sums of one cell column (x-faces) or row
/// (y-faces), shared by the two faces on either side of it.
#[derive(Debug, Clone, Copy)]
struct Transverse {
    p: f64,
    un: f64,
    /// `u_t(+1) - u_t(-1)`
    dt: f64,
    rc: f64,
}

#[inline(always)]
fn transverse(lo: &PrimCell, at: &PrimCell, hi: &PrimCell, axis: Axis) -> Transverse {
    let n = |c: &PrimCell| nt(&c.w, axis).0;
    let t = |c: &PrimCell| nt(&c.w, axis).1;
    Transverse {
        p: (lo.w.p + hi.w.p) + 2.0 * at.w.p,
        un: (n(lo) + n(hi)) + 2.0 * n(at),
        dt: t(hi) - t(lo),
        rc: lo.rc.max(at.rc).max(hi.rc),
    }
}

#[inline(always)]
fn multid_face(l: &Transverse, r: &Transverse, ratio: f64, k_safety: f64) -> FaceData {
    FaceData {
        s: FaceStencil {
            p_avg: 0.125 * (l.p + r.p),
            un_avg: 0.125 * (l.un + r.un),
            p_jump: 0.25 * (r.p - l.p),
            div_n: 0.25 * (r.un - l.un) + ratio * (0.25 * (l.dt + r.dt)),
        },
        a: k_safety * l.rc.max(r.rc),
    }
}

#[inline(always)]
fn split_face(l: &PrimCell, r: &PrimCell, axis: Axis, k_safety: f64) -> FaceData {
    FaceData {
        s: stencil_split(&l.w, &r.w, axis),
        a: k_safety * l.rc.max(r.rc),
    }
}

/// Evaluates `map(i, j, left, right, face)` on the x-faces `(i+1/2, j)` for
/// `j in rows`, `i in cols`, storing results at the left cell index. Same
/// values as [`face_stencil`] and [`face_speed`] up to the grouping of
/// sums, but the transverse sums of each cell column are formed once.
pub(crate) fn map_x_faces<T: Send>(
    prims: &Primitives,
    variant: Variant,
    k_safety: f64,
    out: &mut [T],
    rows: std::ops::Range<isize>,
    cols: std::ops::Range<isize>,
    map: impl Fn(isize, isize, &PrimCell, &PrimCell, FaceData) -> Result<T> + Sync,
) -> Result<()> {
    let spec = prims.spec();
    let ratio = spec.dx / spec.dy;
    for_rows(spec, out, rows, |j, row| {
        let at = prims.row(j);
        match variant {
            Variant::Split => {
                for i in cols.clone() {
                    let (l, r) = (&at[col(i)], &at[col(i + 1)]);
                    row[col(i)] = map(i, j, l, r, split_face(l, r, Axis::X, k_safety))?;
                }
            }
            Variant::Multid => {
                let (lo, hi) = (prims.row(j - 1), prims.row(j + 1));
                let tr = |i: isize| transverse(&lo[col(i)], &at[col(i)], &hi[col(i)], Axis::X);
                let mut left = tr(cols.start);
                for i in cols.clone() {
                    let right = tr(i + 1);
                    let face = multid_face(&left, &right, ratio, k_safety);
                    row[col(i)] = map(i, j, &at[col(i)], &at[col(i + 1)], face)?;
                    left = right;
                }
            }
        }
        Ok(())
    })
}

/// [`map_x_faces`] for the y-faces `(i, j+1/2)`, stored at the lower cell
/// index.
pub(crate) fn map_y_faces<T: Send>(
    prims: &Primitives,
    variant: Variant,
    k_safety: f64,
    out: &mut [T],
    rows: std::ops::Range<isize>,
    cols: std::ops::Range<isize>,
    map: impl Fn(isize, isize, &PrimCell, &PrimCell, FaceData) -> Result<T> + Sync,
) -> Result<()> {
    let spec = prims.spec();
    let ratio = spec.dy / spec.dx;
    for_rows(spec, out, rows, |j, row| {
        let (lo, hi) = (prims.row(j), prims.row(j + 1));
        match variant {
            Variant::Split => {
                for i in cols.clone() {
                    let (l, r) = (&lo[col(i)], &hi[col(i)]);
                    row[col(i)] = map(i, j, l, r, split_face(l, r, Axis::Y, k_safety))?;
                }
            }
            Variant::Multid => {
                for i in cols.clone() {
                    let c = col(i);
                    let l = transverse(&lo[c - 1], &lo[c], &lo[c + 1], Axis::Y);
                    let r = transverse(&hi[c - 1], &hi[c], &hi[c + 1], Axis::Y);
                    let face = multid_face(&l, &r, ratio, k_safety);
                    row[c] = map(i, j, &lo[c], &hi[c], face)?;
                }
            }
        }
        Ok(())
    })
}

/// Interface flux in the global frame `(mass, x-momentum, y-momentum, energy)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluxVector {
    pub mass: f64,
    pub mom_x: f64,
    pub mom_y: f64,
    pub energy: f64,
}

impl FluxVector {
    pub fn to_array(self) -> [f64; 4] {
        [self.mass, self.mom_x, self.mom_y, self.energy]
    }

    /// Maps a flux computed in the face-normal frame of `axis` (normal
    /// momentum second) back to the global frame.
    #[inline]
    pub fn from_normal_frame(self, axis: Axis) -> Self {
        match axis {
            Axis::X => self,
            Axis::Y => Self {
                mom_x: self.mom_y,
                mom_y: self.mom_x,
                ..self
            },
        }
    }
}

/// Exact Euler flux of a state in the direction `axis`.
pub fn euler_flux(q: &ConservedState, gamma: f64, axis: Axis) -> Result<FluxVector> {
    let w = cons_to_prim(q, gamma)?;
    let (un, ut) = nt(&w, axis);
    Ok(FluxVector {
        mass: q.rho * un,
        mom_x: q.rho * un * un + w.p,
        mom_y: q.rho * un * ut,
        energy: un * (q.e + w.p),
    }
    .from_normal_frame(axis))
}

/// Conservative update `q - dt/dx [F_x] - dt/dy [F_y]` of the interior, with
/// x-face fluxes stored at the left cell index and y-face fluxes at the lower
/// cell index. Rejects non-physical results.
pub(crate) fn conservative_update(
    field: &Field,
    fx: &[FluxVector],
    fy: &[FluxVector],
    dt: f64,
    gamma: f64,
    out: &mut Field,
) -> Result<()> {
    let spec = field.spec().clone();
    let (lx, ly) = (dt / spec.dx, dt / spec.dy);
    let ny = spec.ny as isize;
    let nx = spec.nx as isize;
    let src = field.data();
    let stride = spec.stride();
    for_rows(&spec, out.data_mut(), 0..ny, |j, row| {
        let base = (j + G) as usize * stride;
        let (q_row, fx_row) = (&src[base..base + stride], &fx[base..base + stride]);
        let (fn_row, fs_row) = (&fy[base..base + stride], &fy[base - stride..base]);
        let interior = col(0)..col(nx);
        let mut ok = true;
        for c in interior.clone() {
            let (e, w) = (fx_row[c], fx_row[c - 1]);
            let (n, s) = (fn_row[c], fs_row[c]);
            let q = q_row[c];
            let upd = ConservedState::new(
                q.rho - lx * (e.mass - w.mass) - ly * (n.mass - s.mass),
                q.rho_u - lx * (e.mom_x - w.mom_x) - ly * (n.mom_x - s.mom_x),
                q.rho_v - lx * (e.mom_y - w.mom_y) - ly * (n.mom_y - s.mom_y),
                q.e - lx * (e.energy - w.energy) - ly * (n.energy - s.energy),
            );
            // positive density and internal energy, checked without divisions
            let m2 = upd.rho_u * upd.rho_u + upd.rho_v * upd.rho_v;
            ok &= upd.rho > 0.0 && 2.0 * upd.e * upd.rho - m2 > 0.0 && upd.e.is_finite();
            row[c] = upd;
        }
        if ok {
            return Ok(());
        }
        for c in interior {
            if let Err(e) = cons_to_prim(&row[c], gamma) {
                return Err(e.at_cell(c as isize - G, j));
            }
        }
        let c = col(0)
            + row[col(0)..col(nx)]
                .iter()
                .position(|q| {
                    !(q.rho > 0.0
                        && 2.0 * q.e * q.rho - (q.rho_u * q.rho_u + q.rho_v * q.rho_v) > 0.0)
                })
                .unwrap_or(0);
        let q = row[c];
        Err(Error::InvalidState {
            cell: None,
            rho: q.rho,
            p: (gamma - 1.0) * (q.e - 0.5 * (q.rho_u * q.rho_u + q.rho_v * q.rho_v) / q.rho),
        }
        .at_cell(c as isize - G, j))
    })
}

pub(crate) fn step_failure(time: f64, err: Error) -> Error {
    match err {
        Error::StepFailure { .. } => err,
        other => Error::StepFailure {
            time,
            reason: other.to_string(),
        },
    }
}
