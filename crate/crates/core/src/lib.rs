//! Finite-volume solver for the two-dimensional compressible Euler equations
//! on Cartesian grids, with multi-dimensional all-speed variants of a
//! Lagrange-Projection scheme and a relaxation scheme.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustics;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod euler;
pub mod grid;
pub mod io;
pub mod problems;
pub mod stencil;
pub mod toy;

pub use error::{Error, Result};
