use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::context::{mod_inverse, reduce};
use super::scalar::{PadicScalar, INFINITE};
use super::PrimeContext;
use crate::error::{PadicError, Result};

/// A `d x d` matrix over `Q_p` whose entries share one absolute precision.
///
/// Entries are stored in fixed point: `entry(i, j) = ints[i*d + j] * p^scale`
/// with each integer reduced modulo `p^(precision - scale)`. `scale` is kept
/// equal to the minimal entry valuation (or to `precision` for a zero
/// matrix), so [`PadicMatrix::valuation`] is free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicMatrix {
    ctx: PrimeContext,
    dim: usize,
    scale: i64,
    ints: Vec<BigInt>,
    precision: i64,
}

impl PadicMatrix {
    fn from_raw(
        ctx: PrimeContext,
        dim: usize,
        ints: Vec<BigInt>,
        scale: i64,
        precision: i64,
    ) -> Self {
        assert!(precision != INFINITE, "matrices carry finite precision");
        let mut m = Self {
            ctx,
            dim,
            scale,
            ints,
            precision,
        };
        m.normalize();
        m
    }

    fn normalize(&mut self) {
        if self.scale >= self.precision {
            self.scale = self.precision;
            self.ints.iter_mut().for_each(|x| *x = BigInt::zero());
            return;
        }
        let modulus = self.ctx.pow((self.precision - self.scale) as u32);
        for x in self.ints.iter_mut() {
            *x = reduce(x, &modulus);
        }
        let p = self.ctx.p_big();
        while self.scale < self.precision && self.ints.iter().all(|x| (x % &p).is_zero()) {
            if self.ints.iter().all(|x| x.is_zero()) {
                self.scale = self.precision;
                return;
            }
            for x in self.ints.iter_mut() {
                *x /= &p;
            }
            self.scale += 1;
        }
        if self.scale >= self.precision {
            self.scale = self.precision;
            self.ints.iter_mut().for_each(|x| *x = BigInt::zero());
        }
    }

    pub fn zero(ctx: PrimeContext, dim: usize, precision: i64) -> Self {
        Self::from_raw(
            ctx,
            dim,
            vec![BigInt::zero(); dim * dim],
            precision,
            precision,
        )
    }

    pub fn identity(ctx: PrimeContext, dim: usize, precision: i64) -> Self {
        let mut ints = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            ints[i * dim + i] = BigInt::one();
        }
        Self::from_raw(ctx, dim, ints, 0, precision)
    }

    /// Integer entries, row major, reduced modulo `p^precision`.
    pub fn from_integers<T: Into<BigInt> + Clone>(
        ctx: PrimeContext,
        dim: usize,
        entries: &[T],
        precision: i64,
    ) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(PadicError::DimensionMismatch(entries.len(), dim * dim));
        }
        let ints = entries.iter().cloned().map(Into::into).collect();
        Ok(Self::from_raw(ctx, dim, ints, 0, precision))
    }

    /// Rational entries, row major, at absolute precision `precision`.
    pub fn from_rationals(
        ctx: PrimeContext,
        dim: usize,
        entries: &[BigRational],
        precision: i64,
    ) -> Result<Self> {
        let scalars = entries
            .iter()
            .map(|q| {
                PadicScalar::from_rational(ctx, q.numer().clone(), q.denom().clone(), precision)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_scalars(ctx, dim, &scalars)
    }

    /// Builds a matrix from scalars; the common precision is the minimum of
    /// the entry precisions.
    pub fn from_scalars(ctx: PrimeContext, dim: usize, entries: &[PadicScalar]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(PadicError::DimensionMismatch(entries.len(), dim * dim));
        }
        for e in entries {
            ctx.check_same(&e.ctx())?;
        }
        let precision = entries
            .iter()
            .map(PadicScalar::precision)
            .min()
            .unwrap_or(INFINITE);
        if precision == INFINITE {
            return Err(PadicError::InvalidInput(
                "matrix needs a finite precision".into(),
            ));
        }
        let scale = entries
            .iter()
            .map(PadicScalar::valuation_bound)
            .min()
            .unwrap_or(precision)
            .min(precision);
        let ints = entries
            .iter()
            .map(|e| match e.valuation() {
                Some(v) if v < precision => &e.unit().clone() * ctx.pow((v - scale) as u32),
                _ => BigInt::zero(),
            })
            .collect();
        Ok(Self::from_raw(ctx, dim, ints, scale, precision))
    }

    #[inline]
    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Minimal entry valuation; equals the precision for a zero matrix.
    #[inline]
    pub fn valuation(&self) -> i64 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.scale >= self.precision
    }

    pub fn entry(&self, i: usize, j: usize) -> PadicScalar {
        PadicScalar::from_scaled(
            self.ctx,
            self.ints[i * self.dim + j].clone(),
            self.scale,
            self.precision,
        )
    }

    pub fn entries(&self) -> Vec<PadicScalar> {
        (0..self.dim * self.dim)
            .map(|k| {
                PadicScalar::from_scaled(self.ctx, self.ints[k].clone(), self.scale, self.precision)
            })
            .collect()
    }

    /// Integer representatives of the entries, for matrices over `Z_p`.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        if self.scale < 0 {
            return None;
        }
        let f = self.ctx.pow(self.scale as u32);
        Some(self.ints.iter().map(|x| x * &f).collect())
    }

    pub fn truncate(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        Self::from_raw(
            self.ctx,
            self.dim,
            self.ints.clone(),
            self.scale.min(precision),
            precision,
        )
    }

    /// Keeps the stored representatives and declares them valid modulo
    /// `p^precision`; lowering the precision truncates.
    pub fn lift(&self, precision: i64) -> Self {
        if precision <= self.precision {
            return self.truncate(precision);
        }
        let mut m = self.clone();
        m.precision = precision;
        if self.is_zero() {
            m.scale = precision;
        }
        m
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.ctx.check_same(&other.ctx)?;
        if self.dim != other.dim {
            return Err(PadicError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let precision = self.precision.min(other.precision);
        let base = self.scale.min(other.scale).min(precision);
        if base == precision {
            return Ok(Self::zero(self.ctx, self.dim, precision));
        }
        let fa = self.ctx.pow((self.scale.min(precision) - base) as u32);
        let fb = self.ctx.pow((other.scale.min(precision) - base) as u32);
        let ints = self
            .ints
            .iter()
            .zip(&other.ints)
            .map(|(a, b)| a * &fa + b * &fb)
            .collect();
        Ok(Self::from_raw(self.ctx, self.dim, ints, base, precision))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let ints = self.ints.iter().map(|x| -x).collect();
        Self::from_raw(self.ctx, self.dim, ints, self.scale, self.precision)
    }

    /// Matrix product. Precision rule: `min(v(A) + prec(B), v(B) + prec(A))`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let precision = (self.scale + other.precision).min(other.scale + self.precision);
        let scale = self.scale + other.scale;
        if self.is_zero() || other.is_zero() || scale >= precision {
            return Ok(Self::zero(self.ctx, self.dim, precision));
        }
        let d = self.dim;
        let mut ints = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = &self.ints[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &other.ints[k * d + j];
                    if !b.is_zero() {
                        ints[i * d + j] += a * b;
                    }
                }
            }
        }
        Ok(Self::from_raw(self.ctx, d, ints, scale, precision))
    }

    pub fn scalar_mul(&self, s: &PadicScalar) -> Result<Self> {
        self.ctx.check_same(&s.ctx())?;
        if s.is_exact_zero() {
            return Ok(Self::zero(self.ctx, self.dim, self.precision));
        }
        let precision = s
            .valuation_bound()
            .saturating_add(self.precision)
            .min(self.scale.saturating_add(s.precision()));
        match s.valuation() {
            None => Ok(Self::zero(self.ctx, self.dim, precision)),
            Some(v) => {
                let ints = self.ints.iter().map(|x| x * s.unit()).collect();
                Ok(Self::from_raw(
                    self.ctx,
                    self.dim,
                    ints,
                    self.scale + v,
                    precision,
                ))
            }
        }
    }

    /// Multiplication by `p^k`, shifting valuation and precision together.
    pub fn mul_p_power(&self, k: i64) -> Self {
        let mut m = self.clone();
        m.scale += k;
        m.precision += k;
        m
    }

    pub fn divide_by_p(&self, steps: u32) -> Self {
        self.mul_p_power(-(steps as i64))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?
            .checked_sub(&other.checked_mul(self)?)
    }

    pub fn trace(&self) -> PadicScalar {
        let mut acc = PadicScalar::zero(self.ctx);
        for i in 0..self.dim {
            acc = &acc + &self.entry(i, i);
        }
        acc
    }

    /// Inverse of a matrix over `Z_p` with unit determinant, by Gauss-Jordan
    /// elimination modulo `p^precision`. The precision is preserved.
    pub fn invert(&self) -> Result<Self> {
        let d = self.dim;
        if self.scale < 0 {
            return Err(PadicError::NotAUnit(self.scale));
        }
        if self.scale > 0 {
            return Err(PadicError::NotAUnit(self.scale));
        }
        let modulus = self.ctx.pow(self.precision as u32);
        let p = self.ctx.p_big();
        let mut a = self.ints.clone();
        let mut inv: Vec<BigInt> = (0..d * d)
            .map(|k| {
                if k / d == k % d {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| !(&a[r * d + col] % &p).is_zero())
                .ok_or(PadicError::NotAUnit(1))?;
            if pivot != col {
                for j in 0..d {
                    a.swap(pivot * d + j, col * d + j);
                    inv.swap(pivot * d + j, col * d + j);
                }
            }
            let piv_inv = mod_inverse(&a[col * d + col], &modulus).expect("unit pivot");
            for j in 0..d {
                a[col * d + j] = reduce(&(&a[col * d + j] * &piv_inv), &modulus);
                inv[col * d + j] = reduce(&(&inv[col * d + j] * &piv_inv), &modulus);
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let factor = a[r * d + col].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let t = &factor * &a[col * d + j];
                    a[r * d + j] = reduce(&(&a[r * d + j] - t), &modulus);
                    let t = &factor * &inv[col * d + j];
                    inv[r * d + j] = reduce(&(&inv[r * d + j] - t), &modulus);
                }
            }
        }
        Ok(Self::from_raw(self.ctx, d, inv, 0, self.precision))
    }

    /// `v(self - other)`, capped at the precision of the difference.
    pub fn distance_valuation(&self, other: &Self) -> Result<i64> {
        Ok(self.checked_sub(other)?.valuation())
    }

    pub fn eq_mod_precision(&self, other: &Self) -> bool {
        self.checked_sub(other)
            .map(|d| d.is_zero())
            .unwrap_or(false)
    }
}

impl fmt::Display for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ctx.p();
        writeln!(f, "[ mod {p}^{}", self.precision)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| match self.entry(i, j).to_bigint() {
                    Some(n) => n.to_string(),
                    None => self.entry(i, j).to_rational().to_string(),
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}
