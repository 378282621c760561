//! Prabhakar / Mittag-Leffler functions, numerical Laplace transforms and
//! relaxation solvers for Volterra equations with Prabhakar-type kernels.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod laplace;
pub mod levy;
pub mod mlfun;
pub mod quad;
pub mod series;
pub mod special;
pub mod spectral;
pub mod verify;
pub mod volterra;

pub use error::{Error, Result};
