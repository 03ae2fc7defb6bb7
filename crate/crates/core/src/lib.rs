//! Rotating Green-Naghdi and rotating Camassa-Holm modelling toolkit.
//!
//! The numerical core is generic over the scalar type through [`Real`];
//! the aliases below fix it to `f64`.

// Negated comparisons such as `!(x >= floor)` are deliberate. They treat
// NaN as a breach.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod coefficients;
pub mod config;
pub mod consistency;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod output;
pub mod rch;
pub mod reconstruct;
pub mod rgn;
pub mod scalar;
pub mod stats;
pub mod time;

pub use error::{Error, Result};
pub use scalar::{CoefScalar, Real};

pub type Coefficients = coefficients::CoefficientSet<f64>;
pub type Field64 = grid::Field<f64>;
pub type Grid64 = grid::Grid<f64>;
pub type WaveState64 = rgn::WaveState<f64>;
pub type ScalarModel64 = rch::ScalarModel<f64>;
