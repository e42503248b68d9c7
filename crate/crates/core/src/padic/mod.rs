//! Exact p-adic arithmetic at finite precision.

mod context;
mod expo;
pub mod json;
mod matrix;
mod scalar;
mod series;
mod valuation;

pub use context::{is_prime, PrimeContext};
pub use expo::{padic_exp, padic_log, scalar_exp, scalar_log};
pub use matrix::PadicMatrix;
pub use scalar::{sum, PadicScalar, INFINITE};
pub use series::{SeriesVariable, TruncatedSeries};
pub use valuation::RationalValuation;
