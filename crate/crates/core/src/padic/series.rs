use serde::{Deserialize, Serialize};

use super::{PadicScalar, PrimeContext};
use crate::error::{PadicError, Result};

/// Which basis the coefficients of a [`TruncatedSeries`] refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVariable {
    /// The Mahler basis `binom(x, k)`.
    Binomial,
    /// Powers `T^k` of the Amice variable.
    T,
    /// Powers of the derivation `d` generating the Lie algebra of `Z_p`.
    Derivation,
}

/// Coefficients `c_0, ..., c_K` of a series truncated after degree `K`.
///
/// Coefficients keep their own absolute precision: the sequences of
/// interest here (characters `z^k`, moment sequences) have valuations
/// growing linearly in `k`, which a common absolute precision would erase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ctx: PrimeContext,
    variable: SeriesVariable,
    coeffs: Vec<PadicScalar>,
}

impl TruncatedSeries {
    pub fn new(
        ctx: PrimeContext,
        variable: SeriesVariable,
        coeffs: Vec<PadicScalar>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(PadicError::InvalidInput(
                "series needs at least one coefficient".into(),
            ));
        }
        for c in &coeffs {
            ctx.check_same(&c.ctx())?;
        }
        Ok(Self {
            ctx,
            variable,
            coeffs,
        })
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn variable(&self) -> SeriesVariable {
        self.variable
    }

    /// The truncation degree `K`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &PadicScalar {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<PadicScalar> {
        self.coeffs
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        self.ctx.check_same(&other.ctx)?;
        if self.coeffs.len() != other.coeffs.len() {
            return Err(PadicError::TruncationMismatch(
                self.truncation(),
                other.truncation(),
            ));
        }
        if self.variable != other.variable {
            return Err(PadicError::InvalidInput(
                "series in different variables".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn scale(&self, s: &PadicScalar) -> Result<Self> {
        self.ctx.check_same(&s.ctx())?;
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Ok(self.with_coeffs(coeffs))
    }

    /// Cauchy product modulo `X^(K+1)`.
    pub fn mul_truncated(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![PadicScalar::zero(self.ctx); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(self.with_coeffs(coeffs))
    }

    fn with_coeffs(&self, coeffs: Vec<PadicScalar>) -> Self {
        Self {
            ctx: self.ctx,
            variable: self.variable,
            coeffs,
        }
    }

    pub fn eq_mod_precision(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.eq_mod_precision(b))
    }
}
