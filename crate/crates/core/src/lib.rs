//! Computational toolkit for short exponential sums of cusp form
//! coefficients twisted by rational additive characters.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod bounds;
pub mod coefficients;
pub mod error;
pub mod hexfloat;
pub mod moments;
pub mod numeric;
pub mod spacing;
pub mod sums;
pub mod voronoi;

pub use error::{Error, Result};
