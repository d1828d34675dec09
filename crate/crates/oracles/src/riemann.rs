//! Exact solution of the one-dimensional Euler Riemann problem for an ideal
//! gas: Newton iteration on the star-pressure function followed by sampling
//! of the self-similar wave fan.

use crate::{OracleError, Prim1d};

/// Kind of the left or right nonlinear wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// Star region and wave structure of a solved Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: Prim1d,
    pub right: Prim1d,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
}

const TOL: f64 = 1e-14;
const MAX_ITER: usize = 100;

/// Pressure function of one side and its derivative.
fn pressure_function(p: f64, w: &Prim1d, gamma: f64) -> (f64, f64) {
    let c = (gamma * w.p / w.rho).sqrt();
    if p > w.p {
        let a = 2.0 / ((gamma + 1.0) * w.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * w.p;
        let q = (a / (p + b)).sqrt();
        let f = (p - w.p) * q;
        let df = q * (1.0 - 0.5 * (p - w.p) / (b + p));
        (f, df)
    } else {
        let e = (gamma - 1.0) / (2.0 * gamma);
        let ratio = p / w.p;
        let f = 2.0 * c / (gamma - 1.0) * (ratio.powf(e) - 1.0);
        let df = ratio.powf(-(gamma + 1.0) / (2.0 * gamma)) / (w.rho * c);
        (f, df)
    }
}

impl RiemannSolution {
    /// Solves the Riemann problem between `left` and `right`.
    pub fn solve(left: Prim1d, right: Prim1d, gamma: f64) -> Result<Self, OracleError> {
        for w in [&left, &right] {
            if !(w.rho > 0.0 && w.p > 0.0) {
                return Err(OracleError::InvalidState(format!("{w:?}")));
            }
        }
        let cl = (gamma * left.p / left.rho).sqrt();
        let cr = (gamma * right.p / right.rho).sqrt();
        let du = right.u - left.u;
        if 2.0 * (cl + cr) / (gamma - 1.0) <= du {
            return Err(OracleError::Vacuum);
        }
        // two-rarefaction guess, robust for all non-vacuum data
        let e = (gamma - 1.0) / (2.0 * gamma);
        let mut p = ((cl + cr - 0.5 * (gamma - 1.0) * du)
            / (cl / left.p.powf(e) + cr / right.p.powf(e)))
        .powf(1.0 / e);
        p = p.max(1e-12 * left.p.min(right.p));
        let mut converged = false;
        for _ in 0..MAX_ITER {
            let (fl, dfl) = pressure_function(p, &left, gamma);
            let (fr, dfr) = pressure_function(p, &right, gamma);
            let mut next = p - (fl + fr + du) / (dfl + dfr);
            if next <= 0.0 {
                next = 0.5 * p;
            }
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(OracleError::NoConvergence);
        }
        let (fl, _) = pressure_function(p, &left, gamma);
        let (fr, _) = pressure_function(p, &right, gamma);
        let u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        let kind = |w: &Prim1d| {
            if p > w.p {
                WaveKind::Shock
            } else {
                WaveKind::Rarefaction
            }
        };
        Ok(Self {
            left,
            right,
            gamma,
            p_star: p,
            u_star: u,
            left_wave: kind(&left),
            right_wave: kind(&right),
        })
    }

    /// Density on the left and right of the contact.
    pub fn star_densities(&self) -> (f64, f64) {
        let g = self.gamma;
        let star = |w: &Prim1d| {
            let r = self.p_star / w.p;
            if self.p_star > w.p {
                let m = (g - 1.0) / (g + 1.0);
                w.rho * (r + m) / (m * r + 1.0)
            } else {
                w.rho * r.powf(1.0 / g)
            }
        };
        (star(&self.left), star(&self.right))
    }

    /// Shock speed of the left (`left = true`) or right wave; `None` for a
    /// rarefaction.
    pub fn shock_speed(&self, left: bool) -> Option<f64> {
        let g = self.gamma;
        let (w, sign) = if left {
            (&self.left, -1.0)
        } else {
            (&self.right, 1.0)
        };
        if self.p_star <= w.p {
            return None;
        }
        let c = (g * w.p / w.rho).sqrt();
        let r = self.p_star / w.p;
        Some(w.u + sign * c * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt())
    }

    /// Solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> Prim1d {
        let g = self.gamma;
        let (rho_l, rho_r) = self.star_densities();
        if xi <= self.u_star {
            let w = &self.left;
            let c = (g * w.p / w.rho).sqrt();
            match self.shock_speed(true) {
                Some(s) => {
                    if xi <= s {
                        *w
                    } else {
                        Prim1d::new(rho_l, self.u_star, self.p_star)
                    }
                }
                None => {
                    let head = w.u - c;
                    let c_star = c * (self.p_star / w.p).powf((g - 1.0) / (2.0 * g));
                    let tail = self.u_star - c_star;
                    if xi <= head {
                        *w
                    } else if xi >= tail {
                        Prim1d::new(rho_l, self.u_star, self.p_star)
                    } else {
                        let k = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (w.u - xi);
                        let rho = w.rho * k.powf(2.0 / (g - 1.0));
                        let u = 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * w.u + xi);
                        let p = w.p * k.powf(2.0 * g / (g - 1.0));
                        Prim1d::new(rho, u, p)
                    }
                }
            }
        } else {
            let w = &self.right;
            let c = (g * w.p / w.rho).sqrt();
            match self.shock_speed(false) {
                Some(s) => {
                    if xi >= s {
                        *w
                    } else {
                        Prim1d::new(rho_r, self.u_star, self.p_star)
                    }
                }
                None => {
                    let head = w.u + c;
                    let c_star = c * (self.p_star / w.p).powf((g - 1.0) / (2.0 * g));
                    let tail = self.u_star + c_star;
                    if xi >= head {
                        *w
                    } else if xi <= tail {
                        Prim1d::new(rho_r, self.u_star, self.p_star)
                    } else {
                        let k = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (w.u - xi);
                        let rho = w.rho * k.powf(2.0 / (g - 1.0));
                        let u = 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * w.u + xi);
                        let p = w.p * k.powf(2.0 * g / (g - 1.0));
                        Prim1d::new(rho, u, p)
                    }
                }
            }
        }
    }
}

/// Samples the exact Riemann solution between `wl` and `wr` at `xi = x/t`.
pub fn exact_riemann_1d(
    wl: Prim1d,
    wr: Prim1d,
    gamma: f64,
    xi: f64,
) -> Result<Prim1d, OracleError> {
    Ok(RiemannSolution::solve(wl, wr, gamma)?.sample(xi))
}

/// Cell averages (midpoint-sampled on `sub` points per cell) of the exact
/// solution with the jump at `x_jump`, on `n` cells covering `[x_lo, x_hi]`.
pub fn sample_cells(
    sol: &RiemannSolution,
    n: usize,
    (x_lo, x_hi): (f64, f64),
    x_jump: f64,
    t: f64,
    sub: usize,
) -> Vec<Prim1d> {
    let dx = (x_hi - x_lo) / n as f64;
    (0..n)
        .map(|i| {
            if t <= 0.0 {
                let xc = x_lo + (i as f64 + 0.5) * dx;
                return if xc < x_jump { sol.left } else { sol.right };
            }
            let mut acc = Prim1d::new(0.0, 0.0, 0.0);
            for k in 0..sub {
                let x = x_lo + (i as f64 + (k as f64 + 0.5) / sub as f64) * dx;
                let w = sol.sample((x - x_jump) / t);
                acc.rho += w.rho;
                acc.u += w.u;
                acc.p += w.p;
            }
            let s = 1.0 / sub as f64;
            Prim1d::new(acc.rho * s, acc.u * s, acc.p * s)
        })
        .collect()
}
