//! Design and analysis toolkit for rf (Paul) ion traps.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod electrical;
pub mod error;
pub mod fields;
pub mod format;
pub mod geometry;
pub mod heating;
pub mod units;

pub use error::{Error, Result};
