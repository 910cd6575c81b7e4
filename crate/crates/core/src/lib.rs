//! Evaluation of linearly convergent hypergeometric series with rational
//! polynomial coefficients to `n`-bit accuracy.
//!
//! Two evaluators are provided: classical binary splitting over the whole
//! index range ([`binsplit`]), and a block-Horner variant that keeps every
//! intermediate number `O(n)` bits long ([`linspace`]).

pub mod bigfix;
pub mod binsplit;
pub mod catalog;
pub mod error;
pub mod linspace;
pub mod series;

pub use bigfix::{BigInt, Dyadic, Rational};
pub use catalog::{get_constant, ConstantFormula};
pub use error::{Error, Result};
pub use linspace::{evaluate_constant, evaluate_series, Algorithm, EvalOptions};
pub use series::{EvalPlan, Polynomial, SeriesDescriptor, TailModel};
