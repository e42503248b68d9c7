use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::context::{mod_inverse, reduce};
use super::PrimeContext;
use crate::error::{PadicError, Result};

/// Sentinel for the valuation and precision of the exact zero.
pub const INFINITE: i64 = i64::MAX;

/// An element of `Q_p` known modulo `p^precision`.
///
/// Stored as `p^valuation * unit` with `unit` reduced modulo
/// `p^(precision - valuation)` and prime to `p`. Two kinds of zero exist:
/// the exact zero (valuation and precision both [`INFINITE`]) and a zero at
/// precision `N`, meaning "divisible by `p^N`, nothing more is known"; for
/// the latter the stored valuation equals `N` and the unit is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    ctx: PrimeContext,
    valuation: i64,
    unit: BigInt,
    precision: i64,
}

impl PadicScalar {
    pub fn zero(ctx: PrimeContext) -> Self {
        Self {
            ctx,
            valuation: INFINITE,
            unit: BigInt::zero(),
            precision: INFINITE,
        }
    }

    pub fn zero_at(ctx: PrimeContext, precision: i64) -> Self {
        if precision == INFINITE {
            return Self::zero(ctx);
        }
        Self {
            ctx,
            valuation: precision,
            unit: BigInt::zero(),
            precision,
        }
    }

    pub fn one(ctx: PrimeContext, precision: i64) -> Self {
        Self::from_integer(ctx, 1, precision)
    }

    /// `n * p^scale` known modulo `p^precision`.
    pub fn from_scaled(ctx: PrimeContext, n: BigInt, scale: i64, precision: i64) -> Self {
        assert!(precision != INFINITE, "finite precision required");
        if n.is_zero() || scale >= precision {
            return Self::zero_at(ctx, precision);
        }
        let (v, u) = ctx.split_big(&n).expect("nonzero");
        let valuation = scale + v as i64;
        if valuation >= precision {
            return Self::zero_at(ctx, precision);
        }
        let modulus = ctx.pow((precision - valuation) as u32);
        Self {
            ctx,
            valuation,
            unit: reduce(&u, &modulus),
            precision,
        }
    }

    pub fn from_integer(ctx: PrimeContext, n: impl Into<BigInt>, precision: i64) -> Self {
        Self::from_scaled(ctx, n.into(), 0, precision)
    }

    /// `numer / denom` at absolute precision `precision`.
    pub fn from_rational(
        ctx: PrimeContext,
        numer: impl Into<BigInt>,
        denom: impl Into<BigInt>,
        precision: i64,
    ) -> Result<Self> {
        let numer = numer.into();
        let denom = denom.into();
        if denom.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        if numer.is_zero() {
            return Ok(Self::zero_at(ctx, precision));
        }
        let (vn, un) = ctx.split_big(&numer).expect("nonzero");
        let (vd, ud) = ctx.split_big(&denom).expect("nonzero");
        let valuation = vn as i64 - vd as i64;
        if valuation >= precision {
            return Ok(Self::zero_at(ctx, precision));
        }
        let modulus = ctx.pow((precision - valuation) as u32);
        let inv = mod_inverse(&ud, &modulus).expect("unit part is prime to p");
        Ok(Self {
            ctx,
            valuation,
            unit: reduce(&(un * inv), &modulus),
            precision,
        })
    }

    /// A rational number at a given relative precision (digits after the
    /// leading one). Used for exact coefficients whose valuation may be
    /// negative.
    pub fn from_big_rational(ctx: PrimeContext, q: &BigRational, relative: i64) -> Self {
        if q.is_zero() {
            return Self::zero(ctx);
        }
        let (vn, _) = ctx.split_big(q.numer()).expect("nonzero");
        let (vd, _) = ctx.split_big(q.denom()).expect("nonzero");
        let v = vn as i64 - vd as i64;
        Self::from_rational(
            ctx,
            q.numer().clone(),
            q.denom().clone(),
            v + relative.max(1),
        )
        .expect("nonzero denominator")
    }

    /// Validating constructor from stored parts.
    pub fn from_parts(
        ctx: PrimeContext,
        valuation: i64,
        unit: BigInt,
        precision: i64,
    ) -> Result<Self> {
        if valuation > precision {
            return Err(PadicError::InvalidInput(format!(
                "valuation {valuation} exceeds precision {precision}"
            )));
        }
        if valuation == precision {
            if !unit.is_zero() {
                return Err(PadicError::InvalidInput("zero must have unit 0".into()));
            }
            return Ok(Self::zero_at(ctx, precision));
        }
        let modulus = ctx.pow((precision - valuation) as u32);
        if unit.is_negative() || unit >= modulus {
            return Err(PadicError::InvalidInput(format!(
                "unit {unit} not reduced modulo p^{}",
                precision - valuation
            )));
        }
        if (&unit % ctx.p_big()).is_zero() {
            return Err(PadicError::InvalidInput(format!(
                "unit {unit} divisible by p"
            )));
        }
        Ok(Self {
            ctx,
            valuation,
            unit,
            precision,
        })
    }

    #[inline]
    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    /// Valuation of a nonzero element; `None` for either kind of zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.valuation)
        }
    }

    /// Largest `v` certified to satisfy `p^v | self`: the valuation for a
    /// nonzero element, the precision for a zero at precision, and
    /// [`INFINITE`] for the exact zero.
    pub fn valuation_bound(&self) -> i64 {
        self.valuation
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Absolute precision; [`INFINITE`] for the exact zero.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn relative_precision(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.precision - self.valuation
        }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.precision == INFINITE
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.valuation == 0
    }

    /// Integer representative in `[0, p^precision)`, for elements of `Z_p`.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.valuation < 0 {
            return None;
        }
        Some(&self.unit * self.ctx.pow(self.valuation as u32))
    }

    /// The stored representative as a rational number.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let unit = BigRational::from_integer(self.unit.clone());
        if self.valuation >= 0 {
            unit * BigRational::from_integer(self.ctx.pow(self.valuation as u32))
        } else {
            unit / BigRational::from_integer(self.ctx.pow((-self.valuation) as u32))
        }
    }

    /// Drops digits so that the result is known modulo `p^precision`.
    pub fn truncate(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        if self.is_zero() {
            return Self::zero_at(self.ctx, precision);
        }
        Self::from_scaled(self.ctx, self.unit.clone(), self.valuation, precision)
    }

    /// Declares the stored representative valid modulo `p^precision`.
    /// Lowering the precision truncates; raising it keeps the representative.
    pub fn lift(&self, precision: i64) -> Self {
        if precision <= self.precision {
            return self.truncate(precision);
        }
        if self.is_zero() {
            return Self::zero_at(self.ctx, precision);
        }
        Self {
            ctx: self.ctx,
            valuation: self.valuation,
            unit: self.unit.clone(),
            precision,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let precision = self.precision.min(other.precision);
        let base = self.valuation.min(other.valuation).min(precision);
        if base == precision {
            return Ok(Self::zero_at(self.ctx, precision));
        }
        let mut n = BigInt::zero();
        for x in [self, other] {
            if !x.is_zero() && x.valuation < precision {
                n += &x.unit * self.ctx.pow((x.valuation - base) as u32);
            }
        }
        Ok(Self::from_scaled(self.ctx, n, base, precision))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    /// Precision rule: `min(v(x) + prec(y), v(y) + prec(x))`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(self.ctx));
        }
        let precision = self
            .valuation
            .saturating_add(other.precision)
            .min(other.valuation.saturating_add(self.precision));
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero_at(self.ctx, precision));
        }
        Ok(Self::from_scaled(
            self.ctx,
            &self.unit * &other.unit,
            self.valuation + other.valuation,
            precision,
        ))
    }

    fn neg_ref(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self::from_scaled(self.ctx, -&self.unit, self.valuation, self.precision)
    }

    /// Inverse of a unit of `Z_p`; the precision is preserved.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(PadicError::NotAUnit(self.valuation));
        }
        if self.valuation != 0 {
            return Err(PadicError::NotAUnit(self.valuation));
        }
        self.reciprocal()
    }

    /// Inverse in `Q_p`. The relative precision is preserved, so the
    /// absolute precision becomes `precision - 2 * valuation`.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let rel = self.precision - self.valuation;
        let modulus = self.ctx.pow(rel as u32);
        let inv = mod_inverse(&self.unit, &modulus).expect("unit");
        Ok(Self {
            ctx: self.ctx,
            valuation: -self.valuation,
            unit: inv,
            precision: rel - self.valuation,
        })
    }

    pub fn divide(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.reciprocal()?)
    }

    /// Division by `p^steps`: valuation and absolute precision both drop by
    /// `steps`.
    pub fn divide_by_p(&self, steps: u32) -> Self {
        self.mul_p_power(-(steps as i64))
    }

    /// Multiplication by `p^k` for any integer `k`.
    pub fn mul_p_power(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        Self {
            ctx: self.ctx,
            valuation: self.valuation + k,
            unit: self.unit.clone(),
            precision: self.precision + k,
        }
    }

    /// `self^e`. `x^0` is 1 at the precision of `x`, or at precision 64
    /// when `x` is the exact zero.
    pub fn pow(&self, mut e: u64) -> Self {
        if e == 0 {
            let precision = if self.is_exact_zero() {
                64
            } else {
                self.precision.max(1)
            };
            return Self::one(self.ctx, precision);
        }
        let mut result = Self::zero(self.ctx);
        let mut base = self.clone();
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { &result * &base };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// True when `self - other` is zero at the combined precision.
    pub fn eq_mod_precision(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// `v(self - other)`, capped by the precision of the difference.
    pub fn distance_valuation(&self, other: &Self) -> i64 {
        (self - other).valuation_bound()
    }

    pub fn cmp_valuation(&self, other: &Self) -> Ordering {
        self.valuation.cmp(&other.valuation)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ctx.p();
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.is_zero() {
            return write!(f, "O({p}^{})", self.precision);
        }
        match self.valuation.cmp(&0) {
            Ordering::Less => write!(f, "{}/{p}^{}", self.unit, -self.valuation)?,
            _ => write!(f, "{}", self.to_bigint().expect("integral"))?,
        }
        write!(f, " + O({p}^{})", self.precision)
    }
}

impl<'a> Add<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    /// Panics when the primes differ; use [`PadicScalar::checked_add`] to
    /// get an error instead.
    fn add(self, rhs: &PadicScalar) -> PadicScalar {
        self.checked_add(rhs).expect("prime mismatch")
    }
}

impl<'a> Sub<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &PadicScalar) -> PadicScalar {
        self.checked_sub(rhs).expect("prime mismatch")
    }
}

impl<'a> Mul<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &PadicScalar) -> PadicScalar {
        self.checked_mul(rhs).expect("prime mismatch")
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        self.neg_ref()
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        self.neg_ref()
    }
}

/// Sum of scalars; the exact zero for an empty iterator.
pub fn sum<'a>(ctx: PrimeContext, items: impl IntoIterator<Item = &'a PadicScalar>) -> PadicScalar {
    items
        .into_iter()
        .fold(PadicScalar::zero(ctx), |acc, x| &acc + x)
}
