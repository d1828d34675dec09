//! Independent reference solutions for verifying the `allspeed` solvers:
//! the exact 1D Riemann solver, random fields in the kernel of the vertex
//! divergence, and a fine-grid radially symmetric Euler solver.
//!
//! Nothing here depends on the solver crate, so comparisons against these
//! oracles are genuinely independent.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod nullspace;
pub mod radial;
pub mod riemann;

use thiserror::Error;

pub use nullspace::{divergence_nullspace_sample, VelocitySample};
pub use radial::{radial_reference_1d, Geometry, RadialProblem, RadialSample};
pub use riemann::{exact_riemann_1d, RiemannSolution, WaveKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("the Riemann problem generates vacuum")]
    Vacuum,
    #[error("iteration did not converge")]
    NoConvergence,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// One-dimensional primitive state `(rho, u, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prim1d {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl Prim1d {
    pub const fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }
}
