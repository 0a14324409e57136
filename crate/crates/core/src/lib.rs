// NaN must fail the domain checks, so they are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod increments;
pub mod ladder;
pub mod quad;
pub mod rng;
pub mod theory;
pub mod cluster;
pub mod walker;

pub use error::{Error, Result};
