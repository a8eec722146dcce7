//! Exact and numerical computations around the Stern-Brocot tree, Farey
//! sequences and the Farey map.
//!
//! Points are always exact [`Rational`]s. Weights, sums and operator values
//! are generic over [`Scalar`], implemented for [`Rational`], `f64` and
//! `f32`; the aliases below fix the common choices.

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod farey;
pub mod measures;
pub mod poincare;
pub mod scalar;
pub mod selftest;
pub mod stern_brocot;
pub mod transfer;

pub use error::{Error, Result};
pub use exact::{ContinuedFraction, MobiusMap, Rational};
pub use scalar::Scalar;

/// Weighted empirical measure with exact weights.
pub type ExactMeasure = measures::AtomicMeasure<Rational>;
/// Weighted empirical measure with double-precision weights.
pub type FloatMeasure = measures::AtomicMeasure<f64>;
/// Weighted empirical measure with single-precision weights.
pub type Float32Measure = measures::AtomicMeasure<f32>;
