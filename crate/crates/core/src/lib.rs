//! Finite-precision p-adic analysis on `Z_p` and on uniform pro-p groups.
// index loops read closer to the formulas in the linear algebra below
#![allow(clippy::needless_range_loop)]

pub mod amice;
pub mod binomial;
pub mod error;
pub mod groups;
pub mod hopf;
pub mod mahler;
pub mod padic;
pub mod poly;
pub mod validation;

pub use error::{PadicError, Result};
pub use padic::{PadicMatrix, PadicScalar, PrimeContext, RationalValuation, TruncatedSeries};
