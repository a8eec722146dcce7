//! Exact arithmetic foundation: reduced rationals, continued fractions,
//! integer Möbius maps and the Minkowski question-mark function.

mod cf;
mod minkowski;
mod mobius;
mod rational;

pub use cf::ContinuedFraction;
pub use minkowski::{minkowski_q, minkowski_q_f64};
pub use mobius::{Branch, MobiusMap};
pub use rational::{
    ensure_unit_interval, fmt_rational, is_unimodular_pair, mediant, parse_rational, rat,
    Rational,
};
