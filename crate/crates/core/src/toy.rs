//! Scalar relaxation model `dq/dt = -(q - a)/eps` integrated with time step
//! `dt = eps tau`: explicit and implicit Euler both relax to `a` within a
//! time of order `eps`, regardless of how small `eps` is.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyRun {
    pub q0: f64,
    pub a: f64,
    pub eps: f64,
    pub tau: f64,
    /// Number of steps; sequences hold `n + 1` values.
    pub n: usize,
}

impl ToyRun {
    pub fn dt(&self) -> f64 {
        self.eps * self.tau
    }

    /// Explicit Euler is stable only for `0 < tau < 2`.
    pub fn explicit_is_stable(&self) -> bool {
        self.tau > 0.0 && self.tau < 2.0
    }

    /// Predicted half-life `eps tau ln(1/2) / ln|1 - tau|` of the explicit scheme.
    pub fn explicit_half_life(&self) -> f64 {
        self.dt() * 0.5f64.ln() / (1.0 - self.tau).abs().ln()
    }

    /// Predicted half-life `eps tau ln(1/2) / ln(1/(1 + tau))` of the implicit scheme.
    pub fn implicit_half_life(&self) -> f64 {
        self.dt() * 0.5f64.ln() / (1.0 + self.tau).recip().ln()
    }
}

/// `q^{k+1} = q^k - tau (q^k - a)`. Computed for any `tau`; see
/// [`ToyRun::explicit_is_stable`].
pub fn toy_explicit(run: &ToyRun) -> Vec<f64> {
    let mut q = Vec::with_capacity(run.n + 1);
    q.push(run.q0);
    for k in 0..run.n {
        q.push(q[k] - run.tau * (q[k] - run.a));
    }
    q
}

/// `q^{k+1} = (q^k + tau a) / (1 + tau)`.
pub fn toy_implicit(run: &ToyRun) -> Result<Vec<f64>> {
    if !(run.tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau must be positive, got {}",
            run.tau
        )));
    }
    let mut q = Vec::with_capacity(run.n + 1);
    q.push(run.q0);
    for k in 0..run.n {
        q.push((q[k] + run.tau * run.a) / (1.0 + run.tau));
    }
    Ok(q)
}

/// First time at which `|q - a|` reaches half its initial value, linearly
/// interpolated between the bracketing steps.
pub fn half_life(seq: &[f64], a: f64, dt: f64) -> Result<f64> {
    let d0 = (seq.first().copied().unwrap_or(a) - a).abs();
    if d0 == 0.0 {
        return Err(Error::InvalidArgument(
            "sequence starts at the attractor".into(),
        ));
    }
    let target = 0.5 * d0;
    for k in 1..seq.len() {
        let (prev, cur) = ((seq[k - 1] - a).abs(), (seq[k] - a).abs());
        if cur <= target {
            let frac = if prev > cur {
                (prev - target) / (prev - cur)
            } else {
                1.0
            };
            return Ok(dt * ((k - 1) as f64 + frac));
        }
    }
    Err(Error::InvalidArgument(
        "sequence does not decay to half its initial distance".into(),
    ))
}

/// `(n, t, q)` rows.
pub fn toy_csv(seq: &[f64], dt: f64) -> String {
    let mut s = String::from("n,t,q\n");
    for (k, q) in seq.iter().enumerate() {
        s.push_str(&format!("{k},{:.17e},{q:.17e}\n", k as f64 * dt));
    }
    s
}
