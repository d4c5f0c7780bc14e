// Range checks are written as `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bvp;
pub mod cli;
pub mod error;
pub mod energy;
pub mod geometry;
pub mod lagrangian;
pub mod nitsche;
pub mod principal;
pub mod profile;
pub mod quad;
pub mod roots;
pub mod ser;

pub use error::{Error, Result};
