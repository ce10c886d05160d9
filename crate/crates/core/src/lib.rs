// `!(x > 0.0)` is used on purpose so NaN is rejected alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod bigfloat;
pub mod error;
pub mod exec;
pub mod oracle;
pub mod rootfind;
pub mod secular;
pub mod specfun;

pub use bigfloat::{BigComplex, BigReal, PrecisionPolicy};
pub use error::{Error, Result};
pub use exec::Execution;
