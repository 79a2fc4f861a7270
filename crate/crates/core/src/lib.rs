//! Numerics for Hardy spaces on circular multiply connected domains.

// `!(x > tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod galerkin;
pub mod gauge;
pub mod geometry;
pub mod hardy;
pub mod laplace;
pub mod linalg;
pub mod par;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
