//! Suliciu-type relaxation solver with a four-state Riemann fan
//! `q_L | q*_L | q*_R | q_R` separated by `sigma_L`, `u*`, `sigma_R`.
//!
//! All quantities are computed in the face-normal frame (`u` normal, `v`
//! transverse) and rotated back when the flux is assembled.

use crate::error::{Error, Result};
use crate::grid::{Axis, Field, GridSpec, PrimitiveState};

use super::{
    conservative_update, face_stencil, map_x_faces, map_y_faces, stencil_split, FaceData,
    FaceStencil, FluxVector, PrimCell, Primitives, Variant, DEFAULT_A_SAFETY,
};

/// Number of times the relaxation speed is doubled before a face is given up.
pub const MAX_SPEED_DOUBLINGS: usize = 5;

/// Intermediate states of one interface in its normal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxEdgeStates {
    pub u_star: f64,
    pub p_star: f64,
    pub rho_star_l: f64,
    pub rho_star_r: f64,
    /// Specific total energies `e*/rho*`.
    pub spec_e_star_l: f64,
    pub spec_e_star_r: f64,
    pub v_star_l: f64,
    pub v_star_r: f64,
    pub a: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
}

/// Swaps velocity components so that `u` is normal to faces of `axis`.
#[inline]
pub fn to_normal_frame(w: &PrimitiveState, axis: Axis) -> PrimitiveState {
    match axis {
        Axis::X => *w,
        Axis::Y => PrimitiveState::new(w.rho, w.v, w.u, w.p),
    }
}

#[inline]
fn specific_energy(w: &PrimitiveState, gamma: f64) -> f64 {
    w.p / ((gamma - 1.0) * w.rho) + 0.5 * (w.u * w.u + w.v * w.v)
}

/// Star states from interface data `s` and the adjacent (normal-frame) cell
/// states. Fails if a star density denominator is non-positive or the fan is
/// not ordered, i.e. if `a` is too small.
#[inline]
pub(crate) fn relax_star_from_stencil(
    s: &FaceStencil,
    wl: &PrimitiveState,
    wr: &PrimitiveState,
    a: f64,
    gamma: f64,
) -> Result<RelaxEdgeStates> {
    let u_star = s.u_star(a);
    let p_star = s.p_star(a);
    let compress = s.div_n / (2.0 * a);
    let push = s.p_jump / (2.0 * a * a);
    let den_l = 1.0 + wl.rho * compress - wl.rho * push;
    let den_r = 1.0 + wr.rho * compress + wr.rho * push;
    let sigma_l = wl.u - a / wl.rho;
    let sigma_r = wr.u + a / wr.rho;
    if !(den_l > 0.0 && den_r > 0.0 && sigma_l <= u_star && u_star <= sigma_r) {
        return Err(Error::Subcharacteristic { face: None, a });
    }
    let work = p_star * u_star;
    Ok(RelaxEdgeStates {
        u_star,
        p_star,
        rho_star_l: wl.rho / den_l,
        rho_star_r: wr.rho / den_r,
        spec_e_star_l: specific_energy(wl, gamma) + (wl.p * wl.u - work) / a,
        spec_e_star_r: specific_energy(wr, gamma) + (work - wr.p * wr.u) / a,
        v_star_l: wl.v,
        v_star_r: wr.v,
        a,
        sigma_l,
        sigma_r,
    })
}

/// One-dimensional star states between normal-frame states `wl`, `wr`.
pub fn relax_star_1d(
    wl: &PrimitiveState,
    wr: &PrimitiveState,
    a: f64,
    gamma: f64,
) -> Result<RelaxEdgeStates> {
    relax_star_from_stencil(&stencil_split(wl, wr, Axis::X), wl, wr, a, gamma)
}

/// Multi-dimensional star states of the x-face `(i+1/2, j)` or y-face
/// `(i, j+1/2)`: `u*`, `p*` and the star-density denominators use the
/// transverse-averaged stencil, everything else is one-dimensional.
pub fn relax_star_multid(
    prims: &Primitives,
    axis: Axis,
    i: isize,
    j: isize,
    a: f64,
    gamma: f64,
) -> Result<RelaxEdgeStates> {
    let (wl, wr) = adjacent(prims, axis, i, j);
    let s = face_stencil(prims, axis, i, j, Variant::Multid);
    relax_star_from_stencil(&s, &wl, &wr, a, gamma).map_err(|e| at_face(e, i, j))
}

#[inline]
fn adjacent(
    prims: &Primitives,
    axis: Axis,
    i: isize,
    j: isize,
) -> (PrimitiveState, PrimitiveState) {
    let hi = match axis {
        Axis::X => prims.get(i + 1, j),
        Axis::Y => prims.get(i, j + 1),
    };
    (
        to_normal_frame(&prims.get(i, j).w, axis),
        to_normal_frame(&hi.w, axis),
    )
}

fn at_face(err: Error, i: isize, j: isize) -> Error {
    match err {
        Error::Subcharacteristic { a, .. } => Error::Subcharacteristic {
            face: Some((i, j)),
            a,
        },
        other => other,
    }
}

/// Flux `(rho u, rho u^2 + pi, rho u v, u (e + pi))` of the fan state at
/// `x/t = 0`, in the normal frame. The outer states carry their own pressure,
/// the star states `p*`.
#[inline]
pub fn relax_interface_flux(
    edge: &RelaxEdgeStates,
    wl: &PrimitiveState,
    wr: &PrimitiveState,
    gamma: f64,
) -> FluxVector {
    let outer = |w: &PrimitiveState| {
        let m = w.rho * w.u;
        FluxVector {
            mass: m,
            mom_x: m * w.u + w.p,
            mom_y: m * w.v,
            energy: w.u * (w.rho * specific_energy(w, gamma) + w.p),
        }
    };
    let star = |rho: f64, v: f64, spec_e: f64| {
        let u = edge.u_star;
        let m = rho * u;
        FluxVector {
            mass: m,
            mom_x: m * u + edge.p_star,
            mom_y: m * v,
            energy: m * spec_e + u * edge.p_star,
        }
    };
    if edge.sigma_l > 0.0 {
        outer(wl)
    } else if edge.u_star > 0.0 {
        star(edge.rho_star_l, edge.v_star_l, edge.spec_e_star_l)
    } else if edge.sigma_r > 0.0 {
        star(edge.rho_star_r, edge.v_star_r, edge.spec_e_star_r)
    } else {
        outer(wr)
    }
}

/// Normal-frame fan flux at `x/t = 0` for the speed `a`, or `None` if `a`
/// violates the subcharacteristic condition. Equivalent to
/// [`relax_star_from_stencil`] followed by [`relax_interface_flux`], but
/// only the state that is actually sampled is formed.
#[inline(always)]
fn sampled_flux(
    s: &FaceStencil,
    l: &PrimCell,
    r: &PrimCell,
    axis: Axis,
    a: f64,
    inv_gm1: f64,
) -> Option<FluxVector> {
    let (wl, wr) = (to_normal_frame(&l.w, axis), to_normal_frame(&r.w, axis));
    let inv_a = 1.0 / a;
    let u_star = s.un_avg - 0.5 * s.p_jump * inv_a;
    let p_star = s.p_avg - 0.5 * a * s.div_n;
    let compress = 0.5 * s.div_n * inv_a;
    let push = 0.5 * s.p_jump * inv_a * inv_a;
    let den_l = 1.0 + wl.rho * compress - wl.rho * push;
    let den_r = 1.0 + wr.rho * compress + wr.rho * push;
    let sigma_l = wl.u - a * l.tau;
    let sigma_r = wr.u + a * r.tau;
    if !(den_l > 0.0 && den_r > 0.0 && sigma_l <= u_star && u_star <= sigma_r) {
        return None;
    }
    let kinetic = |w: &PrimitiveState| 0.5 * (w.u * w.u + w.v * w.v);
    let outer = |w: &PrimitiveState| {
        let m = w.rho * w.u;
        FluxVector {
            mass: m,
            mom_x: m * w.u + w.p,
            mom_y: m * w.v,
            energy: w.u * (w.p * inv_gm1 + w.rho * kinetic(w) + w.p),
        }
    };
    let star = |w: &PrimitiveState, tau: f64, den: f64, dwork: f64| {
        let rho = w.rho / den;
        let spec_e = w.p * tau * inv_gm1 + kinetic(w) + dwork * inv_a;
        let m = rho * u_star;
        FluxVector {
            mass: m,
            mom_x: m * u_star + p_star,
            mom_y: m * w.v,
            energy: m * spec_e + u_star * p_star,
        }
    };
    let work = p_star * u_star;
    let flux = if sigma_l > 0.0 {
        outer(&wl)
    } else if u_star > 0.0 {
        star(&wl, l.tau, den_l, wl.p * wl.u - work)
    } else if sigma_r > 0.0 {
        star(&wr, r.tau, den_r, work - wr.p * wr.u)
    } else {
        outer(&wr)
    };
    Some(flux.from_normal_frame(axis))
}

/// Global-frame flux through one face with data `d`, between cells `lo` and
/// `hi`, doubling `a` on subcharacteristic violations.
#[inline]
fn face_flux(
    d: FaceData,
    lo: &PrimCell,
    hi: &PrimCell,
    axis: Axis,
    (i, j): (isize, isize),
    gamma: f64,
) -> Result<FluxVector> {
    let inv_gm1 = 1.0 / (gamma - 1.0);
    let mut a = d.a;
    for _ in 0..=MAX_SPEED_DOUBLINGS {
        if let Some(flux) = sampled_flux(&d.s, lo, hi, axis, a, inv_gm1) {
            return Ok(flux);
        }
        a *= 2.0;
    }
    Err(Error::Subcharacteristic {
        face: Some((i, j)),
        a: a / 2.0,
    })
}

/// One-step driver for the relaxation scheme with reusable buffers.
#[derive(Debug, Clone)]
pub struct RelaxStepper {
    variant: Variant,
    gamma: f64,
    k_safety: f64,
    prims: Primitives,
    fx: Vec<FluxVector>,
    fy: Vec<FluxVector>,
}

impl RelaxStepper {
    pub fn new(spec: &GridSpec, variant: Variant, gamma: f64, k_safety: f64) -> Self {
        Self {
            variant,
            gamma,
            k_safety,
            prims: Primitives::new(spec),
            fx: vec![FluxVector::default(); spec.padded_len()],
            fy: vec![FluxVector::default(); spec.padded_len()],
        }
    }

    pub fn with_defaults(spec: &GridSpec, variant: Variant) -> Self {
        Self::new(spec, variant, crate::grid::DEFAULT_GAMMA, DEFAULT_A_SAFETY)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Converts `f` (ghosts filled) to primitives for the next
    /// [`step_prepared`](Self::step_prepared) calls and returns the largest
    /// interior signal speed.
    pub fn prepare(&mut self, f: &Field) -> Result<f64> {
        self.prims.update(f, self.gamma)?;
        Ok(self.prims.max_speed())
    }

    /// Advances the field last passed to [`prepare`](Self::prepare) by `dt`
    /// into `out`, whose ghosts are filled on success.
    pub fn step_prepared(&mut self, f: &Field, dt: f64, out: &mut Field) -> Result<()> {
        let spec = f.spec();
        let (nx, ny) = (spec.nx as isize, spec.ny as isize);
        let (prims, variant, k, gamma) = (&self.prims, self.variant, self.k_safety, self.gamma);
        map_x_faces(
            prims,
            variant,
            k,
            &mut self.fx,
            0..ny,
            -1..nx,
            |i, j, lo, hi, d| face_flux(d, lo, hi, Axis::X, (i, j), gamma),
        )?;
        map_y_faces(
            prims,
            variant,
            k,
            &mut self.fy,
            -1..ny,
            0..nx,
            |i, j, lo, hi, d| face_flux(d, lo, hi, Axis::Y, (i, j), gamma),
        )?;
        conservative_update(f, &self.fx, &self.fy, dt, gamma, out)?;
        out.fill_ghosts();
        Ok(())
    }

    /// Advances `f` (ghosts filled) by `dt` into `out`, whose ghosts are
    /// filled on success.
    pub fn step_into(&mut self, f: &Field, dt: f64, out: &mut Field) -> Result<()> {
        self.prepare(f)?;
        self.step_prepared(f, dt, out)
    }

    pub fn step(&mut self, f: &Field, dt: f64) -> Result<Field> {
        let mut out = f.clone();
        self.step_into(f, dt, &mut out)?;
        Ok(out)
    }
}

/// Conservative update `q - dt/dx [F_x] - dt/dy [F_y]` with relaxation fluxes.
pub fn relax_step(f: &Field, dt: f64, variant: Variant, gamma: f64) -> Result<Field> {
    RelaxStepper::new(f.spec(), variant, gamma, DEFAULT_A_SAFETY).step(f, dt)
}
