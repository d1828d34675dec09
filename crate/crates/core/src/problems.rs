//! Initial conditions of the benchmark problems: the Gresho vortex (alone and
//! with a superposed sound pulse), a cylindrical Sod problem, a
//! Kelvin-Helmholtz shear layer and the planar Sod shock tube.
//!
//! All states are sampled at cell centers. The Mach number of the low-speed
//! problems is set through the background pressure; the solver itself always
//! integrates the unscaled Euler equations.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field, GridSpec, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Gresho,
    GreshoSound,
    RadialSod,
    KelvinHelmholtz,
    Sod1d,
}

impl Problem {
    pub const ALL: [Problem; 5] = [
        Problem::Gresho,
        Problem::GreshoSound,
        Problem::RadialSod,
        Problem::KelvinHelmholtz,
        Problem::Sod1d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Gresho => "gresho",
            Problem::GreshoSound => "gresho-sound",
            Problem::RadialSod => "radial-sod",
            Problem::KelvinHelmholtz => "kelvin-helmholtz",
            Problem::Sod1d => "sod-1d",
        }
    }

    /// `eps` used when none is given.
    pub fn default_eps(self) -> f64 {
        match self {
            Problem::Gresho | Problem::GreshoSound => 1e-2,
            _ => 1.0,
        }
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Problem::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown problem '{s}' (expected one of: {})",
                    names.join(", ")
                ))
            })
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A problem together with its Mach parameter and resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub problem: Problem,
    pub eps: f64,
    pub nx: usize,
    /// Ignored by [`Problem::Sod1d`], which always uses three rows.
    pub ny: usize,
    pub gamma: f64,
}

impl ProblemSpec {
    pub fn new(problem: Problem, eps: f64, nx: usize, ny: usize, gamma: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eps must be positive, got {eps}"
            )));
        }
        if !(gamma > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must exceed 1, got {gamma}"
            )));
        }
        Ok(Self {
            problem,
            eps,
            nx,
            ny,
            gamma,
        })
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let (nx, ny) = (self.nx, self.ny);
        match self.problem {
            Problem::Gresho => {
                GridSpec::covering(nx, ny, (0.0, 1.0), (0.0, 1.0), Boundary::Periodic)
            }
            Problem::GreshoSound => {
                GridSpec::covering(nx, ny, (0.0, 2.0), (0.0, 2.0), Boundary::ZeroGradient)
            }
            Problem::RadialSod => {
                GridSpec::covering(nx, ny, (0.0, 1.0), (0.0, 1.0), Boundary::ZeroGradient)
            }
            Problem::KelvinHelmholtz => {
                GridSpec::covering(nx, ny, (0.0, 2.0), (0.0, 1.0), Boundary::Periodic)
            }
            Problem::Sod1d => {
                let dx = 1.0 / nx as f64;
                GridSpec::new(
                    nx,
                    3,
                    dx,
                    dx,
                    0.0,
                    0.0,
                    Boundary::ZeroGradient,
                    Boundary::Periodic,
                )
            }
        }
    }

    /// Initial field with ghosts filled.
    pub fn build(&self) -> Result<Field> {
        let grid = self.grid()?;
        Ok(match self.problem {
            Problem::Gresho => gresho(grid, self.eps, self.gamma, (0.5, 0.5)),
            Problem::GreshoSound => gresho_with_sound_wave(grid, self.eps, self.gamma),
            Problem::RadialSod => radial_sod(grid, self.gamma),
            Problem::KelvinHelmholtz => kelvin_helmholtz(grid, self.gamma),
            Problem::Sod1d => sod_1d(self.nx, self.gamma)?,
        })
    }
}

/// Background pressure `1/(gamma eps^2) - 1/2` giving peak Mach number `eps`.
pub fn gresho_background_pressure(eps: f64, gamma: f64) -> f64 {
    1.0 / (gamma * eps * eps) - 0.5
}

/// Angular velocity profile of the vortex.
pub fn gresho_vphi(r: f64) -> f64 {
    if r < 0.2 {
        5.0 * r
    } else if r < 0.4 {
        2.0 - 5.0 * r
    } else {
        0.0
    }
}

/// Pressure balancing the centrifugal force of [`gresho_vphi`] at unit density.
pub fn gresho_pressure(r: f64, eps: f64, gamma: f64) -> f64 {
    let p0 = gresho_background_pressure(eps, gamma);
    if r < 0.2 {
        p0 + 12.5 * r * r
    } else if r < 0.4 {
        p0 + 4.0 * (5.0 * r).ln() + 4.0 - 20.0 * r + 12.5 * r * r
    } else {
        p0 + 4.0 * 2f64.ln() - 2.0
    }
}

fn gresho_state(dx: f64, dy: f64, eps: f64, gamma: f64) -> PrimitiveState {
    let r = dx.hypot(dy);
    let vphi = gresho_vphi(r);
    let (sin, cos) = if r > 0.0 {
        (dy / r, dx / r)
    } else {
        (0.0, 1.0)
    };
    PrimitiveState::new(1.0, -vphi * sin, vphi * cos, gresho_pressure(r, eps, gamma))
}

/// Gresho vortex of unit density centered at `center`.
pub fn gresho(grid: GridSpec, eps: f64, gamma: f64, center: (f64, f64)) -> Field {
    let g = grid.clone();
    Field::from_primitive_fn(grid, gamma, |i, j| {
        let (dx, dy) = g.offset_from(i, j, center.0, center.1);
        gresho_state(dx, dy, eps, gamma)
    })
}

/// Center of the vortex in the sound-pulse problem.
pub const SOUND_WAVE_VORTEX_CENTER: (f64, f64) = (1.0, 0.5);

/// Right-moving acoustic pulse `dp = 300 exp(-((x - 0.2)/0.02)^2)` with
/// `drho = dp / c^2` and `du = dp / (rho c)`, where `rho = 1` and `c` is the
/// sound speed of the far field.
pub fn sound_pulse(x: f64, eps: f64, gamma: f64) -> (f64, f64, f64) {
    let p_inf = gresho_pressure(1.0, eps, gamma);
    let rho_inf = 1.0;
    let c_inf = (gamma * p_inf / rho_inf).sqrt();
    let dp = 300.0 * (-((x - 0.2) / 0.02).powi(2)).exp();
    (dp / (c_inf * c_inf), dp / (rho_inf * c_inf), dp)
}

/// Gresho vortex at [`SOUND_WAVE_VORTEX_CENTER`] with [`sound_pulse`] added
/// to the primitive variables.
pub fn gresho_with_sound_wave(grid: GridSpec, eps: f64, gamma: f64) -> Field {
    let g = grid.clone();
    let (xc, yc) = SOUND_WAVE_VORTEX_CENTER;
    Field::from_primitive_fn(grid, gamma, |i, j| {
        let (dx, dy) = g.offset_from(i, j, xc, yc);
        let w = gresho_state(dx, dy, eps, gamma);
        let (x, _) = g.cell_center(i, j);
        let (drho, du, dp) = sound_pulse(x, eps, gamma);
        PrimitiveState::new(w.rho + drho, w.u + du, w.v, w.p + dp)
    })
}

pub const SOD_LEFT: PrimitiveState = PrimitiveState::new(1.0, 0.0, 0.0, 1.0);
pub const SOD_RIGHT: PrimitiveState = PrimitiveState::new(0.125, 0.0, 0.0, 0.1);

/// Sod states inside / outside the circle of radius 0.3 around the domain
/// center.
pub fn radial_sod(grid: GridSpec, gamma: f64) -> Field {
    let g = grid.clone();
    let ((x0, x1), (y0, y1)) = g.extent();
    let (xc, yc) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    Field::from_primitive_fn(grid, gamma, |i, j| {
        let (dx, dy) = g.offset_from(i, j, xc, yc);
        if dx.hypot(dy) < 0.3 {
            SOD_LEFT
        } else {
            SOD_RIGHT
        }
    })
}

/// Shear speed of the Kelvin-Helmholtz layers.
pub const KH_SHEAR_SPEED: f64 = 0.1;

/// Left-moving strip `0.25 <= y <= 0.75` of density 1.01 in right-moving
/// fluid of density 1, at pressure `1/gamma` (unit background sound speed),
/// seeded with `v = 1e-3 sin(2 pi x / 0.25)`.
pub fn kelvin_helmholtz(grid: GridSpec, gamma: f64) -> Field {
    let g = grid.clone();
    Field::from_primitive_fn(grid, gamma, |i, j| {
        let (x, y) = g.cell_center(i, j);
        let inner = (0.25..=0.75).contains(&y);
        let (rho, u) = if inner {
            (1.01, -KH_SHEAR_SPEED)
        } else {
            (1.0, KH_SHEAR_SPEED)
        };
        let v = 1e-3 * (std::f64::consts::TAU * x / 0.25).sin();
        PrimitiveState::new(rho, u, v, 1.0 / gamma)
    })
}

/// Sod shock tube on `[0, 1]` with the jump at 0.5, as `n x 3` cells with
/// periodic rows.
pub fn sod_1d(n: usize, gamma: f64) -> Result<Field> {
    let dx = 1.0 / n as f64;
    let grid = GridSpec::new(
        n,
        3,
        dx,
        dx,
        0.0,
        0.0,
        Boundary::ZeroGradient,
        Boundary::Periodic,
    )?;
    Ok(Field::from_primitive_fn(grid, gamma, |i, _| {
        if 2 * i + 1 < n as isize {
            SOD_LEFT
        } else {
            SOD_RIGHT
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sound_speed_and_mach;

    const G: f64 = 1.4;

    #[test]
    fn background_pressure() {
        assert!((gresho_background_pressure(0.1, G) - 70.928_571_428_571_43).abs() < 1e-10);
    }

    #[test]
    fn gresho_pressure_is_continuous() {
        for eps in [1.0, 0.1, 1e-3] {
            for r in [0.2, 0.4] {
                let below = gresho_pressure(r - 1e-15, eps, G);
                let above = gresho_pressure(r, eps, G);
                assert!(
                    (below - above).abs() <= 1e-14 * above.max(1.0) + 1e-13,
                    "{eps} {r}"
                );
            }
        }
        let p0 = gresho_background_pressure(0.1, G);
        assert_eq!(gresho_pressure(0.45, 0.1, G), p0 + 4.0 * 2f64.ln() - 2.0);
        assert_eq!(gresho_vphi(0.45), 0.0);
    }

    #[test]
    fn gresho_mach_at_peak() {
        let eps = 0.1;
        let w = gresho_state(0.2, 0.0, eps, G);
        let (_, m) = sound_speed_and_mach(&w, G);
        assert!((m - eps).abs() < 1e-12, "{m}");

        let f = ProblemSpec::new(Problem::Gresho, eps, 100, 100, G)
            .unwrap()
            .build()
            .unwrap();
        let max = f
            .interior()
            .map(|(i, j, _)| sound_speed_and_mach(&f.primitive(i, j, G).unwrap(), G).1)
            .fold(0.0, f64::max);
        assert!((max - eps).abs() < 0.02 * eps, "{max}");
    }

    #[test]
    fn gresho_is_quarter_turn_symmetric() {
        let f = ProblemSpec::new(Problem::Gresho, 0.1, 20, 20, G)
            .unwrap()
            .build()
            .unwrap();
        for (i, j, q) in f.interior() {
            // rotation by 90 degrees: (i, j) -> (n-1-j, i), (u, v) -> (-v, u)
            let r = f.get(19 - j, i);
            assert_eq!(r.rho_u, -q.rho_v);
            assert_eq!(r.rho_v, q.rho_u);
            assert_eq!(r.e, q.e);
        }
    }

    #[test]
    fn sound_pulse_shape() {
        let eps = 1e-2;
        let (drho, du, dp) = sound_pulse(0.2, eps, G);
        assert_eq!(dp, 300.0);
        let c = (G * gresho_pressure(1.0, eps, G)).sqrt();
        assert!((du / dp - 1.0 / c).abs() < 1e-15);
        assert!((drho / dp - 1.0 / (c * c)).abs() < 1e-18);

        let grid =
            GridSpec::covering(100, 100, (0.0, 2.0), (0.0, 2.0), Boundary::ZeroGradient).unwrap();
        let with = gresho_with_sound_wave(grid.clone(), eps, G);
        let without = gresho(grid, eps, G, SOUND_WAVE_VORTEX_CENTER);
        for (i, j, q) in with.interior() {
            if i > 30 {
                assert!(q.max_abs_diff(&without.get(i, j)) <= 1e-12 * q.e, "{i} {j}");
            }
        }
    }

    #[test]
    fn radial_sod_states_and_symmetry() {
        let f = ProblemSpec::new(Problem::RadialSod, 1.0, 50, 50, G)
            .unwrap()
            .build()
            .unwrap();
        let w = f.primitive(25, 25, G).unwrap();
        assert_eq!((w.rho, w.p), (1.0, 1.0));
        let w = f.primitive(0, 25, G).unwrap();
        assert_eq!((w.rho, w.p), (0.125, 0.1));
        for (i, j, q) in f.interior() {
            assert_eq!(q, f.get(49 - i, j));
            assert_eq!(q, f.get(i, 49 - j));
            assert_eq!(q, f.get(j, i));
        }
    }

    #[test]
    fn kelvin_helmholtz_layers() {
        let f = ProblemSpec::new(Problem::KelvinHelmholtz, 1.0, 80, 40, G)
            .unwrap()
            .build()
            .unwrap();
        let spec = f.spec().clone();
        let mut vmax = 0.0f64;
        for (i, j, _) in f.interior() {
            let w = f.primitive(i, j, G).unwrap();
            let (x, y) = spec.cell_center(i, j);
            if (y - 0.5).abs() < 0.2 {
                assert_eq!(w.rho, 1.01);
                assert!(w.u < 0.0);
            } else if (y - 0.5).abs() > 0.3 {
                assert_eq!(w.rho, 1.0);
                assert!(w.u > 0.0);
            }
            // period 0.25 = 10 cells
            if i + 10 < 80 {
                let ws = f.primitive(i + 10, j, G).unwrap();
                assert!((ws.v - w.v).abs() < 1e-15);
            }
            vmax = vmax.max(w.v.abs());
            let _ = x;
        }
        assert!((vmax - 1e-3).abs() < 1e-5, "{vmax}");
    }

    #[test]
    fn sod_1d_states() {
        let f = sod_1d(10, G).unwrap();
        assert_eq!(f.spec().ny, 3);
        assert_eq!(f.primitive(4, 1, G).unwrap(), SOD_LEFT);
        assert_eq!(f.primitive(5, 1, G).unwrap(), SOD_RIGHT);
    }

    #[test]
    fn problem_names_round_trip() {
        for p in Problem::ALL {
            assert_eq!(p.name().parse::<Problem>().unwrap(), p);
        }
        assert!("vortex".parse::<Problem>().is_err());
    }
}
