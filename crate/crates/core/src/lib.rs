// `!(x > 0.0)` is used on purpose so NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod report;
pub mod solutions;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
