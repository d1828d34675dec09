//! Forward Euler time integration with CFL step control, step-failure
//! retries, periodic diagnostics and dumps.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::acoustics::{acoustic_step, AcousticParams, AcousticState};
use crate::diagnostics::{measure, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::euler::lp::LpStepper;
use crate::euler::relax::RelaxStepper;
use crate::euler::{step_failure, Variant, DEFAULT_A_SAFETY};
use crate::grid::{cons_to_prim, prim_to_cons, Field, PrimitiveState, DEFAULT_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    LpSplit,
    LpMultid,
    RelaxSplit,
    RelaxMultid,
    AcousticSplit,
    AcousticMultid,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::LpSplit,
        Scheme::LpMultid,
        Scheme::RelaxSplit,
        Scheme::RelaxMultid,
        Scheme::AcousticSplit,
        Scheme::AcousticMultid,
    ];

    /// The four schemes for the full Euler equations.
    pub const EULER: [Scheme; 4] = [
        Scheme::LpSplit,
        Scheme::LpMultid,
        Scheme::RelaxSplit,
        Scheme::RelaxMultid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::LpSplit => "lp-split",
            Scheme::LpMultid => "lp-multid",
            Scheme::RelaxSplit => "relax-split",
            Scheme::RelaxMultid => "relax-multid",
            Scheme::AcousticSplit => "acoustic-split",
            Scheme::AcousticMultid => "acoustic-multid",
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            Scheme::LpSplit | Scheme::RelaxSplit | Scheme::AcousticSplit => Variant::Split,
            _ => Variant::Multid,
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scheme::ALL.iter().map(|x| x.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown scheme '{s}' (expected one of: {})",
                    names.join(", ")
                ))
            })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Default limit on consecutive step halvings.
pub const DEFAULT_MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub cfl: f64,
    pub gamma: f64,
    /// Safety factor `K` of the relaxation speed.
    pub a_safety: f64,
    pub t_end: f64,
    /// Dump interval; `None` dumps only the initial and final states.
    pub dump_every: Option<f64>,
    /// Diagnostics interval; `None` records only the initial and final states.
    pub diag_every: Option<f64>,
    /// Scale of the pressure-gradient diagnostics.
    pub eps_report: f64,
    pub max_halvings: usize,
    /// Optional hard cap on the number of steps.
    pub max_steps: Option<usize>,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, t_end: f64) -> Self {
        Self {
            scheme,
            cfl: 0.9,
            gamma: DEFAULT_GAMMA,
            a_safety: DEFAULT_A_SAFETY,
            t_end,
            dump_every: None,
            diag_every: None,
            eps_report: 1.0,
            max_halvings: DEFAULT_MAX_HALVINGS,
            max_steps: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.a_safety >= 1.0) {
            return bad(format!(
                "a_safety must be at least 1, got {}",
                self.a_safety
            ));
        }
        for (name, v) in [
            ("dump_every", self.dump_every),
            ("diag_every", self.diag_every),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        Ok(())
    }
}

/// `cfl min(dx, dy) / max(|u| + c, |v| + c)` over interior cells.
pub fn compute_dt(f: &Field, cfl: f64, gamma: f64) -> Result<f64> {
    let s = f.spec();
    let mut smax = 0.0f64;
    for (i, j, q) in f.interior() {
        let w = cons_to_prim(&q, gamma).map_err(|e| e.at_cell(i, j))?;
        // same rounding as the steppers' signal speed
        let c = (gamma * w.p * w.rho).sqrt() / w.rho;
        smax = smax.max(w.u.abs().max(w.v.abs()) + c);
    }
    Ok(cfl * s.dx.min(s.dy) / smax)
}

/// Linear acoustics about the mean state of a field: velocities and
/// `P = p / rho_bar` evolve with `c = sqrt(gamma p_bar / rho_bar)`, and the
/// density follows `rho = rho_bar + (p - p_bar) / c^2`.
#[derive(Debug, Clone)]
pub struct AcousticEmbedding {
    pub params: AcousticParams,
    pub rho_bar: f64,
    pub p_bar: f64,
    gamma: f64,
}

impl AcousticEmbedding {
    pub fn new(f: &Field, gamma: f64) -> Result<Self> {
        let s = f.spec();
        let (mut rho, mut p) = (0.0, 0.0);
        for (i, j, _) in f.interior() {
            let w = f.primitive(i, j, gamma)?;
            rho += w.rho;
            p += w.p;
        }
        let n = s.n_cells() as f64;
        let (rho_bar, p_bar) = (rho / n, p / n);
        let mut params =
            AcousticParams::new((gamma * p_bar / rho_bar).sqrt(), 1.0, s.dx, s.dy, s.bc_x)?;
        params.bc_y = s.bc_y;
        Ok(Self {
            params,
            rho_bar,
            p_bar,
            gamma,
        })
    }

    pub fn to_state(&self, f: &Field) -> Result<AcousticState> {
        let s = f.spec();
        let mut out = AcousticState::zeros(s.nx, s.ny);
        for (i, j, _) in f.interior() {
            let w = f.primitive(i, j, self.gamma)?;
            out.u.set(i, j, w.u);
            out.v.set(i, j, w.v);
            out.p.set(i, j, (w.p - self.p_bar) / self.rho_bar);
        }
        out.fill_ghosts(&self.params);
        Ok(out)
    }

    pub fn write_state(&self, a: &AcousticState, out: &mut Field) -> Result<()> {
        let c2 = self.params.c * self.params.c;
        let (nx, ny) = (out.spec().nx as isize, out.spec().ny as isize);
        for j in 0..ny {
            for i in 0..nx {
                let dp = self.rho_bar * a.p.get(i, j);
                let w = PrimitiveState::new(
                    self.rho_bar + dp / c2,
                    a.u.get(i, j),
                    a.v.get(i, j),
                    self.p_bar + dp,
                );
                if !w.is_valid() {
                    return Err(Error::InvalidState {
                        cell: Some((i, j)),
                        rho: w.rho,
                        p: w.p,
                    });
                }
                out.set(i, j, prim_to_cons(&w, self.gamma));
            }
        }
        out.fill_ghosts();
        Ok(())
    }
}

/// One-step update of any scheme with reusable buffers.
#[derive(Debug, Clone)]
pub enum Stepper {
    Lp(Box<LpStepper>),
    Relax(RelaxStepper),
    Acoustic {
        variant: Variant,
        embedding: AcousticEmbedding,
    },
}

impl Stepper {
    /// Builds the stepper for `f`'s grid. Acoustic schemes linearize about
    /// the mean state of `f`.
    pub fn new(config: &SchemeConfig, f: &Field) -> Result<Self> {
        let (spec, g, k) = (f.spec(), config.gamma, config.a_safety);
        let v = config.scheme.variant();
        Ok(match config.scheme {
            Scheme::LpSplit | Scheme::LpMultid => {
                Stepper::Lp(Box::new(LpStepper::new(spec, v, g, k)))
            }
            Scheme::RelaxSplit | Scheme::RelaxMultid => {
                Stepper::Relax(RelaxStepper::new(spec, v, g, k))
            }
            Scheme::AcousticSplit | Scheme::AcousticMultid => Stepper::Acoustic {
                variant: v,
                embedding: AcousticEmbedding::new(f, g)?,
            },
        })
    }

    /// Largest step allowed by `cfl`.
    pub fn stable_dt(&self, f: &Field, cfl: f64, gamma: f64) -> Result<f64> {
        match self {
            Stepper::Acoustic { embedding, .. } => Ok(embedding.params.time_step(cfl)),
            _ => compute_dt(f, cfl, gamma),
        }
    }

    /// Prepares stepping from `f` and returns the largest step allowed by
    /// `cfl` (the value of [`stable_dt`](Self::stable_dt)).
    pub fn prepare(&mut self, f: &Field, cfl: f64) -> Result<f64> {
        let s = f.spec();
        let h = s.dx.min(s.dy);
        match self {
            Stepper::Lp(st) => Ok(cfl * h / st.prepare(f)?),
            Stepper::Relax(st) => Ok(cfl * h / st.prepare(f)?),
            Stepper::Acoustic { embedding, .. } => Ok(embedding.params.time_step(cfl)),
        }
    }

    /// Advances the field last passed to [`prepare`](Self::prepare) by `dt`.
    pub fn step_prepared(&mut self, f: &Field, dt: f64, out: &mut Field) -> Result<()> {
        match self {
            Stepper::Lp(s) => s.step_prepared(f, dt, out),
            Stepper::Relax(s) => s.step_prepared(f, dt, out),
            Stepper::Acoustic { variant, embedding } => {
                let a = embedding.to_state(f)?;
                let next = acoustic_step(&a, &embedding.params, dt, *variant);
                embedding.write_state(&next, out)
            }
        }
    }

    /// Advances `f` by `dt` into `out` (ghosts filled on success).
    pub fn step_into(&mut self, f: &Field, dt: f64, out: &mut Field) -> Result<()> {
        self.prepare(f, 1.0)?;
        self.step_prepared(f, dt, out)
    }

    pub fn step(&mut self, f: &Field, dt: f64) -> Result<Field> {
        let mut out = f.clone();
        self.step_into(f, dt, &mut out)?;
        Ok(out)
    }
}

/// Receives outputs while a run progresses.
pub trait RunObserver {
    fn diagnostics(&mut self, _rec: &DiagnosticsRecord) -> Result<()> {
        Ok(())
    }

    fn dump(&mut self, _field: &Field, _time: f64, _index: usize) -> Result<()> {
        Ok(())
    }
}

/// Observer that discards everything.
impl RunObserver for () {}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub steps: usize,
    /// Number of step halvings after failed attempts.
    pub halvings: usize,
    pub wall_time: Duration,
    /// Time of the final (last valid) state.
    pub time: f64,
    pub diagnostics: Vec<DiagnosticsRecord>,
    /// Set when a step failed even after the maximal number of halvings.
    pub failure: Option<Error>,
    pub field: Field,
}

fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::StepFailure { .. } | Error::InvalidState { .. } | Error::Subcharacteristic { .. }
    )
}

/// Periodic output schedule `every, 2 every, ...`.
struct Schedule {
    every: Option<f64>,
    k: u64,
}

impl Schedule {
    fn next(&self) -> f64 {
        self.every
            .map_or(f64::INFINITY, |e| (self.k + 1) as f64 * e)
    }
}

fn record(
    f: &Field,
    t: f64,
    config: &SchemeConfig,
    observer: &mut impl RunObserver,
    diags: &mut Vec<DiagnosticsRecord>,
) -> Result<()> {
    let rec = measure(f, config.gamma, config.eps_report, t)?;
    observer.diagnostics(&rec)?;
    diags.push(rec);
    Ok(())
}

/// Integrates `initial` (ghosts filled) to `config.t_end`.
///
/// Step failures are retried with halved steps; if a step still fails the
/// run stops, the last valid state is dumped and the error is stored in
/// [`RunRecord::failure`]. `Err` is returned only for invalid configuration
/// or initial data and for observer errors.
pub fn run(
    config: &SchemeConfig,
    initial: Field,
    observer: &mut impl RunObserver,
) -> Result<RunRecord> {
    config.validate()?;
    initial.validate(config.gamma)?;
    let start = Instant::now();
    let mut stepper = Stepper::new(config, &initial)?;
    let mut f = initial;
    let mut buf = f.clone();
    let mut t = 0.0f64;
    let (mut steps, mut halvings, mut dump_index) = (0usize, 0usize, 0usize);
    let mut diags = Vec::new();
    let mut failure = None;
    let mut diag_sched = Schedule {
        every: config.diag_every,
        k: 0,
    };
    let mut dump_sched = Schedule {
        every: config.dump_every,
        k: 0,
    };

    record(&f, t, config, observer, &mut diags)?;
    observer.dump(&f, t, dump_index)?;
    dump_index += 1;
    let (mut last_diag, mut last_dump) = (0.0f64, 0.0f64);

    while t < config.t_end && config.max_steps.is_none_or(|m| steps < m) {
        let target = config.t_end.min(diag_sched.next()).min(dump_sched.next());
        let dt_cfl = stepper.prepare(&f, config.cfl)?;
        let (mut dt, mut hits) = if t + dt_cfl >= target {
            (target - t, true)
        } else {
            (dt_cfl, false)
        };
        let mut attempt = 0;
        let outcome = loop {
            match stepper.step_prepared(&f, dt, &mut buf) {
                Ok(()) => break Ok(()),
                Err(e) if retryable(&e) && attempt < config.max_halvings => {
                    attempt += 1;
                    halvings += 1;
                    dt *= 0.5;
                    hits = false;
                }
                Err(e) => break Err(e),
            }
        };
        if let Err(e) = outcome {
            failure = Some(step_failure(t, e));
            break;
        }
        t = if hits { target } else { t + dt };
        std::mem::swap(&mut f, &mut buf);
        steps += 1;
        if t >= diag_sched.next() {
            record(&f, t, config, observer, &mut diags)?;
            last_diag = t;
            while diag_sched.next() <= t {
                diag_sched.k += 1;
            }
        }
        if t >= dump_sched.next() {
            observer.dump(&f, t, dump_index)?;
            dump_index += 1;
            last_dump = t;
            while dump_sched.next() <= t {
                dump_sched.k += 1;
            }
        }
    }
    if last_diag != t || diags.len() == 1 && t > 0.0 {
        record(&f, t, config, observer, &mut diags)?;
    }
    if last_dump != t {
        observer.dump(&f, t, dump_index)?;
    }
    Ok(RunRecord {
        steps,
        halvings,
        wall_time: start.elapsed(),
        time: t,
        diagnostics: diags,
        failure,
        field: f,
    })
}
