//! Run configuration for the `allspeed` command-line tool.
//!
//! Config files hold `key = value` lines, optionally grouped under
//! `[section]` headers, with `#` comments:
//!
//! ```text
//! [problem]
//! problem = gresho
//! eps = 1e-2
//!
//! [grid]
//! nx = 50
//! ny = 50
//!
//! [scheme]
//! scheme = lp-multid
//! t_end = 1
//! ```
//!
//! Sections only organise the file; each key may appear in any of them, at
//! most once. Command-line flags override file values.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use allspeed::driver::{Scheme, SchemeConfig, DEFAULT_MAX_HALVINGS};
use allspeed::euler::DEFAULT_A_SAFETY;
use allspeed::grid::DEFAULT_GAMMA;
use allspeed::problems::{Problem, ProblemSpec};
use thiserror::Error;

/// Keys that must be given, in the config file or as flags.
pub const REQUIRED_KEYS: [&str; 5] = ["problem", "scheme", "nx", "ny", "t_end"];

/// Every recognised key.
pub const KNOWN_KEYS: [&str; 14] = [
    "problem",
    "scheme",
    "nx",
    "ny",
    "eps",
    "cfl",
    "gamma",
    "a_safety",
    "t_end",
    "out",
    "dump_every",
    "diag_every",
    "max_halvings",
    "seed",
];

pub const DEFAULT_CFL: f64 = 0.9;
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing required key(s): {}", .0.join(", "))]
    Missing(Vec<&'static str>),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Config values as read from a file or flags; unset keys are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub problem: Option<Problem>,
    pub scheme: Option<Scheme>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub eps: Option<f64>,
    pub cfl: Option<f64>,
    pub gamma: Option<f64>,
    pub a_safety: Option<f64>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
    pub dump_every: Option<f64>,
    pub diag_every: Option<f64>,
    pub max_halvings: Option<usize>,
    pub seed: Option<u64>,
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Line {
        line,
        msg: format!("malformed value {value:?} for {key}: {e}"),
    })
}

fn parse_float(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_value(line, key, value)?;
    if !x.is_finite() {
        return Err(ConfigError::Line {
            line,
            msg: format!("{key} must be finite, got {value}"),
        });
    }
    Ok(x)
}

impl PartialConfig {
    /// Parses config text; values are type-checked here, completeness only
    /// in [`resolve`](Self::resolve).
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        let mut seen: Vec<&str> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                if !rest.ends_with(']') || rest.len() < 2 {
                    return Err(ConfigError::Line {
                        line,
                        msg: format!("malformed section header {content:?}"),
                    });
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Line {
                    line,
                    msg: format!("expected `key = value`, got {content:?}"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KNOWN_KEYS.iter().find(|&&k| k == key) else {
                return Err(ConfigError::Line {
                    line,
                    msg: format!(
                        "unknown key {key:?} (known keys: {})",
                        KNOWN_KEYS.join(", ")
                    ),
                });
            };
            if seen.contains(&known) {
                return Err(ConfigError::Line {
                    line,
                    msg: format!("duplicate key {key:?}"),
                });
            }
            seen.push(known);
            if value.is_empty() {
                return Err(ConfigError::Line {
                    line,
                    msg: format!("missing value for {key}"),
                });
            }
            c.set(line, known, value)?;
        }
        Ok(c)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "problem" => self.problem = Some(parse_value(line, key, value)?),
            "scheme" => self.scheme = Some(parse_value(line, key, value)?),
            "nx" => self.nx = Some(parse_value(line, key, value)?),
            "ny" => self.ny = Some(parse_value(line, key, value)?),
            "eps" => self.eps = Some(parse_float(line, key, value)?),
            "cfl" => self.cfl = Some(parse_float(line, key, value)?),
            "gamma" => self.gamma = Some(parse_float(line, key, value)?),
            "a_safety" => self.a_safety = Some(parse_float(line, key, value)?),
            "t_end" => self.t_end = Some(parse_float(line, key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "dump_every" => self.dump_every = Some(parse_float(line, key, value)?),
            "diag_every" => self.diag_every = Some(parse_float(line, key, value)?),
            "max_halvings" => self.max_halvings = Some(parse_value(line, key, value)?),
            "seed" => self.seed = Some(parse_value(line, key, value)?),
            _ => unreachable!("key list and setter disagree on {key}"),
        }
        Ok(())
    }

    /// Values of `over` take precedence over those of `self`.
    pub fn overridden_by(self, over: PartialConfig) -> Self {
        Self {
            problem: over.problem.or(self.problem),
            scheme: over.scheme.or(self.scheme),
            nx: over.nx.or(self.nx),
            ny: over.ny.or(self.ny),
            eps: over.eps.or(self.eps),
            cfl: over.cfl.or(self.cfl),
            gamma: over.gamma.or(self.gamma),
            a_safety: over.a_safety.or(self.a_safety),
            t_end: over.t_end.or(self.t_end),
            out: over.out.or(self.out),
            dump_every: over.dump_every.or(self.dump_every),
            diag_every: over.diag_every.or(self.diag_every),
            max_halvings: over.max_halvings.or(self.max_halvings),
            seed: over.seed.or(self.seed),
        }
    }

    /// Fills in defaults and checks that the result describes a valid run.
    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let present = [
            self.problem.is_some(),
            self.scheme.is_some(),
            self.nx.is_some(),
            self.ny.is_some(),
            self.t_end.is_some(),
        ];
        let missing: Vec<&'static str> = REQUIRED_KEYS
            .iter()
            .zip(present)
            .filter(|(_, p)| !p)
            .map(|(k, _)| *k)
            .collect();
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }
        let problem = self.problem.unwrap();
        let mut scheme = SchemeConfig::new(self.scheme.unwrap(), self.t_end.unwrap());
        scheme.cfl = self.cfl.unwrap_or(DEFAULT_CFL);
        scheme.gamma = self.gamma.unwrap_or(DEFAULT_GAMMA);
        scheme.a_safety = self.a_safety.unwrap_or(DEFAULT_A_SAFETY);
        scheme.dump_every = self.dump_every;
        scheme.diag_every = self.diag_every;
        scheme.max_halvings = self.max_halvings.unwrap_or(DEFAULT_MAX_HALVINGS);
        let eps = self.eps.unwrap_or(problem.default_eps());
        scheme.eps_report = eps;
        let cfg = RunConfig {
            problem: ProblemSpec::new(
                problem,
                eps,
                self.nx.unwrap(),
                self.ny.unwrap(),
                scheme.gamma,
            )
            .map_err(|e| ConfigError::Invalid(e.to_string()))?,
            scheme,
            out: self.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            seed: self.seed.unwrap_or(0),
        };
        let invalid = |e: allspeed::Error| ConfigError::Invalid(e.to_string());
        cfg.problem.grid().map_err(invalid)?;
        cfg.scheme.validate().map_err(invalid)?;
        Ok(cfg)
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub scheme: SchemeConfig,
    pub out: PathBuf,
    /// Seed for the sampling subcommands.
    pub seed: u64,
}

impl RunConfig {
    /// Config text that [`parse_config`] maps back to `self`.
    pub fn to_config_text(&self) -> String {
        let p = &self.problem;
        let s = &self.scheme;
        let mut t = format!(
            "[problem]\nproblem = {}\neps = {:e}\ngamma = {:e}\n\n[grid]\nnx = {}\nny = {}\n\n\
             [scheme]\nscheme = {}\ncfl = {:e}\na_safety = {:e}\nt_end = {:e}\nmax_halvings = {}\n\n\
             [output]\nout = {}\nseed = {}\n",
            p.problem,
            p.eps,
            s.gamma,
            p.nx,
            p.ny,
            s.scheme,
            s.cfl,
            s.a_safety,
            s.t_end,
            s.max_halvings,
            self.out.display(),
            self.seed,
        );
        if let Some(d) = s.dump_every {
            t.push_str(&format!("dump_every = {d:e}\n"));
        }
        if let Some(d) = s.diag_every {
            t.push_str(&format!("diag_every = {d:e}\n"));
        }
        t
    }
}

/// Parses and resolves a complete config file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    PartialConfig::parse(text)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "problem = gresho\nscheme = lp-multid\nnx = 50\nny = 50\neps = 1e-2\nt_end = 1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.problem.problem, Problem::Gresho);
        assert_eq!(c.problem.eps, 1e-2);
        assert_eq!((c.problem.nx, c.problem.ny), (50, 50));
        assert_eq!(c.scheme.scheme, Scheme::LpMultid);
        assert_eq!(c.scheme.cfl, 0.9);
        assert_eq!(c.scheme.gamma, 1.4);
        assert_eq!(c.scheme.a_safety, 1.01);
        assert_eq!(c.scheme.eps_report, 1e-2);
        assert_eq!(c.out, PathBuf::from("out"));
    }

    #[test]
    fn sections_and_comments_are_accepted() {
        let text = "# Gresho run\n[problem]\nproblem = gresho  # vortex\n\n[grid]\nnx = 8\nny = 8\n[scheme]\nscheme = relax-split\nt_end = 0.5\ncfl = 0.4\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.scheme.cfl, 0.4);
        assert_eq!(c.problem.eps, Problem::Gresho.default_eps());
    }

    #[test]
    fn bogus_scheme_names_the_valid_ones() {
        let err = parse_config(&MINIMAL.replace("lp-multid", "bogus")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("line 2:"), "{msg}");
        for s in Scheme::ALL {
            assert!(msg.contains(s.name()), "{msg}");
        }
    }

    #[test]
    fn empty_text_lists_required_keys() {
        let err = parse_config("").unwrap_err();
        assert_eq!(err, ConfigError::Missing(REQUIRED_KEYS.to_vec()));
        for k in REQUIRED_KEYS {
            assert!(err.to_string().contains(k));
        }
        let err = parse_config("problem = sod-1d\nnx = 10\n").unwrap_err();
        assert_eq!(err, ConfigError::Missing(vec!["scheme", "ny", "t_end"]));
    }

    #[test]
    fn line_numbers_point_at_the_offending_line() {
        let cases = [
            ("problem = gresho\ncolour = red\n", 2, "unknown key"),
            ("\n\nnx = fifty\n", 3, "malformed value"),
            ("cfl = 0.5\ncfl = 0.6\n", 2, "duplicate"),
            ("nx 50\n", 1, "key = value"),
            ("[grid\n", 1, "section"),
            ("eps = inf\n", 1, "finite"),
            ("t_end =\n", 1, "missing value"),
        ];
        for (text, line, what) in cases {
            match PartialConfig::parse(text) {
                Err(ConfigError::Line { line: l, msg }) => {
                    assert_eq!(l, line, "{text:?}");
                    assert!(msg.contains(what), "{msg}");
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn invalid_values_are_rejected_on_resolve() {
        assert!(matches!(
            parse_config(&format!("{MINIMAL}cfl = -1\n")),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            parse_config(&MINIMAL.replace("nx = 50", "nx = 0")),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn flags_override_file_values() {
        let file = PartialConfig::parse(MINIMAL).unwrap();
        let flags = PartialConfig {
            cfl: Some(0.3),
            nx: Some(20),
            ..Default::default()
        };
        let c = file.overridden_by(flags).resolve().unwrap();
        assert_eq!(c.scheme.cfl, 0.3);
        assert_eq!(c.problem.nx, 20);
        assert_eq!(c.problem.ny, 50);
    }

    #[test]
    fn config_text_round_trips() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.scheme.dump_every = Some(0.25);
        c.scheme.diag_every = Some(0.01);
        c.seed = 7;
        assert_eq!(parse_config(&c.to_config_text()).unwrap(), c);
    }
}
