use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::PrimeContext;
use crate::error::PadicError;

/// An exact rational exponent `v` standing for the absolute value `|p|^v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct RationalValuation(Ratio<i64>);

impl RationalValuation {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self(Ratio::new(numer, denom))
    }

    pub fn integer(v: i64) -> Self {
        Self(Ratio::from_integer(v))
    }

    pub fn zero() -> Self {
        Self(Ratio::zero())
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// `v(r_n) = 1/((p-1) p^n)`, the valuation of the radius separating
    /// analyticity levels.
    pub fn radius(ctx: &PrimeContext, n: u32) -> Self {
        let p = ctx.p() as i64;
        let denom = (p - 1) * p.checked_pow(n).expect("level too large");
        Self::new(1, denom)
    }

    /// Half the gap between the radii of levels `n` and `n + 1`:
    /// `1/(2 (p-1) p^(n+1))`.
    pub fn half_gap(ctx: &PrimeContext, n: u32) -> Self {
        let p = ctx.p() as i64;
        let denom = 2 * (p - 1) * p.checked_pow(n + 1).expect("level too large");
        Self::new(1, denom)
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }
}

impl fmt::Display for RationalValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl From<RationalValuation> for String {
    fn from(v: RationalValuation) -> String {
        v.to_string()
    }
}

impl FromStr for RationalValuation {
    type Err = PadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PadicError::InvalidInput(format!("bad rational {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Self::new(n, d))
            }
            None => Ok(Self::integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

impl TryFrom<String> for RationalValuation {
    type Error = PadicError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<i64> for RationalValuation {
    fn from(v: i64) -> Self {
        Self::integer(v)
    }
}

impl Add for RationalValuation {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for RationalValuation {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for RationalValuation {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul<i64> for RationalValuation {
    type Output = Self;
    fn mul(self, rhs: i64) -> Self {
        Self(self.0 * rhs)
    }
}
