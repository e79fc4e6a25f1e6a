// Tabulated constants keep their published digits; negated comparisons and
// min/max chains are used on purpose so that NaN inputs are rejected.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::manual_clamp)]

pub mod averaging;
pub mod cli;
pub mod config;
pub mod error;
pub mod fisher;
pub mod geometry;
pub mod maxent;
pub mod model;
pub mod numerics;
pub mod relativity;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
