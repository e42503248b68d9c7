//! Mahler expansions `f(x) = sum c_k binom(x, k)` of functions on `Z_p`,
//! decay slopes of the coefficients, and membership in the spaces `F_n`
//! of Mahler series with `v(c_k) >= k v(r_n)` asymptotically.

use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{PadicError, Result};
use crate::padic::{PadicScalar, PrimeContext, RationalValuation, SeriesVariable, TruncatedSeries};
use crate::poly::IntPoly;

/// Values `f(0), ..., f(K)` at one common precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    ctx: PrimeContext,
    values: Vec<PadicScalar>,
    precision: i64,
}

impl FunctionTable {
    pub fn new(ctx: PrimeContext, values: Vec<PadicScalar>) -> Result<Self> {
        if values.len() < 2 {
            return Err(PadicError::InvalidInput(
                "a function table needs K >= 1".into(),
            ));
        }
        let precision = values[0].precision();
        for v in &values {
            ctx.check_same(&v.ctx())?;
            if v.precision() != precision {
                return Err(PadicError::InvalidInput(format!(
                    "mismatched precisions {} and {}",
                    precision,
                    v.precision()
                )));
            }
        }
        Ok(Self {
            ctx,
            values,
            precision,
        })
    }

    /// Samples an integer polynomial at `0..=k_max`.
    pub fn from_poly(ctx: PrimeContext, f: &IntPoly, k_max: usize, precision: i64) -> Result<Self> {
        let values = (0..=k_max as i64)
            .map(|x| PadicScalar::from_integer(ctx, f.eval_i64(x), precision))
            .collect();
        Self::new(ctx, values)
    }

    pub fn from_fn(
        ctx: PrimeContext,
        k_max: usize,
        precision: i64,
        f: impl Fn(u64) -> BigInt,
    ) -> Result<Self> {
        let values = (0..=k_max as u64)
            .map(|x| PadicScalar::from_integer(ctx, f(x), precision))
            .collect();
        Self::new(ctx, values)
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn values(&self) -> &[PadicScalar] {
        &self.values
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn truncation(&self) -> usize {
        self.values.len() - 1
    }
}

/// Coefficients `c_0, ..., c_K` on the Mahler basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MahlerSeries(TruncatedSeries);

impl MahlerSeries {
    pub fn new(ctx: PrimeContext, coeffs: Vec<PadicScalar>) -> Result<Self> {
        Ok(Self(TruncatedSeries::new(
            ctx,
            SeriesVariable::Binomial,
            coeffs,
        )?))
    }

    pub fn ctx(&self) -> PrimeContext {
        self.0.ctx()
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        self.0.coeffs()
    }

    pub fn truncation(&self) -> usize {
        self.0.truncation()
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    pub fn scale(&self, s: &PadicScalar) -> Result<Self> {
        Ok(Self(self.0.scale(s)?))
    }

    pub fn eq_mod_precision(&self, other: &Self) -> bool {
        self.0.eq_mod_precision(&other.0)
    }
}

/// `c_k = sum_i (-1)^(k-i) binom(k, i) f(i)`, computed as iterated forward
/// differences (the Pascal recurrence), so no division occurs and the
/// coefficients keep the precision of the table.
pub fn mahler_coefficients(f: &FunctionTable) -> MahlerSeries {
    let mut row = f.values.clone();
    let mut coeffs = Vec::with_capacity(row.len());
    while !row.is_empty() {
        coeffs.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    MahlerSeries::new(f.ctx, coeffs).expect("same prime")
}

/// `binom(x, k)` for `x` in `Z_p`.
///
/// Computed exactly on the integer representative of `x`. Changing `x` by
/// `p^N t` changes `binom(x, k)` by `sum_j binom(x, k-j) binom(p^N t, j)`,
/// which is divisible by `p^(N - floor(log_p k))`; that is the reported
/// precision.
pub fn binomial_at(x: &PadicScalar, k: u64) -> Result<PadicScalar> {
    binomials_at(x, k).map(|mut v| v.pop().expect("nonempty"))
}

/// `binom(x, 0), ..., binom(x, k_max)` with the precision rule of
/// [`binomial_at`].
pub fn binomials_at(x: &PadicScalar, k_max: u64) -> Result<Vec<PadicScalar>> {
    let ctx = x.ctx();
    if x.valuation_bound() < 0 {
        return Err(PadicError::OutsideDomain {
            found: x.valuation_bound(),
            required: 0,
        });
    }
    let rep = x
        .to_bigint()
        .ok_or_else(|| PadicError::InvalidInput("x must lie in Z_p".into()))?;
    let base_precision = x.precision();
    let loss = ctx.floor_log(k_max.max(1)) as i64;
    if base_precision != crate::padic::INFINITE && base_precision - loss < 1 {
        return Err(PadicError::PrecisionExhausted(format!(
            "x known mod p^{base_precision} cannot resolve binom(x, {k_max})"
        )));
    }
    let mut out = Vec::with_capacity(k_max as usize + 1);
    let mut b = BigInt::one();
    for k in 0..=k_max {
        if k > 0 {
            b = b * (&rep - BigInt::from(k - 1)) / BigInt::from(k);
        }
        let precision = if base_precision == crate::padic::INFINITE {
            crate::padic::INFINITE
        } else {
            base_precision - ctx.floor_log(k.max(1)) as i64
        };
        out.push(if precision == crate::padic::INFINITE {
            if b.is_zero() {
                PadicScalar::zero(ctx)
            } else {
                return Err(PadicError::InvalidInput(
                    "x must carry a finite precision".into(),
                ));
            }
        } else {
            PadicScalar::from_integer(ctx, b.clone(), precision)
        });
    }
    Ok(out)
}

/// Partial sum `sum_{k <= K} c_k binom(x, k)`.
pub fn evaluate(series: &MahlerSeries, x: &PadicScalar) -> Result<PadicScalar> {
    series.ctx().check_same(&x.ctx())?;
    let binoms = binomials_at(x, series.truncation() as u64)?;
    let mut acc = PadicScalar::zero(series.ctx());
    for (c, b) in series.coeffs().iter().zip(&binoms) {
        acc = &acc + &(c * b);
    }
    Ok(acc)
}

/// Mahler coefficients `c_k = z^k` of the character `a -> (1 + z)^a`.
pub fn character_series(z: &PadicScalar, k_max: usize) -> Result<MahlerSeries> {
    if z.is_exact_zero() {
        return Err(PadicError::InvalidInput(
            "give z = 0 at a finite precision".into(),
        ));
    }
    if let Some(v) = z.valuation() {
        if v < 1 {
            return Err(PadicError::OutsideDomain {
                found: v,
                required: 1,
            });
        }
    }
    let mut coeffs = Vec::with_capacity(k_max + 1);
    let mut power = PadicScalar::one(z.ctx(), z.precision());
    for _ in 0..=k_max {
        coeffs.push(power.clone());
        power = &power * z;
    }
    MahlerSeries::new(z.ctx(), coeffs)
}

/// What is known about `v(c_k)` for one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KValuation {
    Exact(i64),
    /// Zero at precision `N`: `v >= N`.
    AtLeast(i64),
    Infinite,
}

impl KValuation {
    pub fn of(x: &PadicScalar) -> Self {
        if x.is_exact_zero() {
            KValuation::Infinite
        } else if x.is_zero() {
            KValuation::AtLeast(x.precision())
        } else {
            KValuation::Exact(x.valuation().expect("nonzero"))
        }
    }

    /// The certified lower bound, `None` when infinite.
    pub fn bound(&self) -> Option<i64> {
        match *self {
            KValuation::Exact(v) | KValuation::AtLeast(v) => Some(v),
            KValuation::Infinite => None,
        }
    }
}

impl fmt::Display for KValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KValuation::Exact(v) => write!(f, "{v}"),
            KValuation::AtLeast(v) => write!(f, ">={v}"),
            KValuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for KValuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Estimate of `liminf v(c_k)/k` over a tail window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeEstimate {
    /// Attained by a nonzero coefficient.
    Finite(RationalValuation),
    /// Only a lower bound is known: the minimum was attained by a
    /// coefficient that is zero at its precision.
    AtLeast(RationalValuation),
    /// Every tail coefficient is exactly zero.
    Infinite,
}

impl SlopeEstimate {
    /// `true` when the estimate certifies `slope >= threshold`,
    /// `false` when it certifies `slope < threshold`, `None` otherwise.
    pub fn at_least(&self, threshold: RationalValuation) -> Option<bool> {
        match *self {
            SlopeEstimate::Finite(s) => Some(s >= threshold),
            SlopeEstimate::AtLeast(s) => (s >= threshold).then_some(true),
            SlopeEstimate::Infinite => Some(true),
        }
    }

    /// Same for the strict inequality `slope > threshold`.
    pub fn greater_than(&self, threshold: RationalValuation) -> Option<bool> {
        match *self {
            SlopeEstimate::Finite(s) => Some(s > threshold),
            SlopeEstimate::AtLeast(s) => (s > threshold).then_some(true),
            SlopeEstimate::Infinite => Some(true),
        }
    }
}

impl fmt::Display for SlopeEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeEstimate::Finite(s) => write!(f, "{s}"),
            SlopeEstimate::AtLeast(s) => write!(f, ">={s}"),
            SlopeEstimate::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for SlopeEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayReport {
    pub per_k_valuations: Vec<KValuation>,
    pub slope: SlopeEstimate,
    pub tail_window: (usize, usize),
    /// Smallest `n` with `slope >= v(r_n)`; `None` when no level qualifies.
    pub verdict_floor: Option<u32>,
}

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;

/// Minimum of `v(c_k)/k` over `k >= K - floor(fraction * K)`.
pub fn slope_of(
    coeffs: &[PadicScalar],
    window_fraction: f64,
) -> Result<(SlopeEstimate, (usize, usize))> {
    if !(0.0..=1.0).contains(&window_fraction) || window_fraction == 0.0 {
        return Err(PadicError::InvalidInput(format!(
            "window fraction {window_fraction} outside (0, 1]"
        )));
    }
    let k_max = coeffs.len() - 1;
    let k_lo = (k_max - (window_fraction * k_max as f64).floor() as usize).max(1);
    let mut best: Option<(Ratio<i64>, bool)> = None;
    for (k, c) in coeffs.iter().enumerate().skip(k_lo) {
        let kv = KValuation::of(c);
        let Some(bound) = kv.bound() else { continue };
        let ratio = Ratio::new(bound, k as i64);
        let exact = matches!(kv, KValuation::Exact(_));
        best = match best {
            None => Some((ratio, exact)),
            Some((r, e)) if ratio < r || (ratio == r && !exact && e) => Some((ratio, exact)),
            keep => keep,
        };
    }
    let slope = match best {
        None => SlopeEstimate::Infinite,
        Some((r, true)) => SlopeEstimate::Finite(RationalValuation::new(*r.numer(), *r.denom())),
        Some((r, false)) => SlopeEstimate::AtLeast(RationalValuation::new(*r.numer(), *r.denom())),
    };
    Ok((slope, (k_lo, k_max)))
}

/// Smallest `n >= 0` with `slope >= 1/((p-1)p^n)`.
pub fn level_floor(ctx: &PrimeContext, slope: &SlopeEstimate) -> Option<u32> {
    let s = match slope {
        SlopeEstimate::Infinite => return Some(0),
        SlopeEstimate::Finite(s) | SlopeEstimate::AtLeast(s) => *s,
    };
    if s <= RationalValuation::zero() {
        return None;
    }
    let p = ctx.p() as i64;
    let mut n = 0u32;
    loop {
        let denom = p.checked_pow(n).and_then(|pn| pn.checked_mul(p - 1))?;
        if s >= RationalValuation::new(1, denom) {
            return Some(n);
        }
        n += 1;
    }
}

pub fn decay_slope(series: &MahlerSeries, window_fraction: f64) -> Result<DecayReport> {
    if series.truncation() < MIN_TAIL_TRUNCATION {
        return Err(PadicError::InvalidInput(format!(
            "decay estimates need K >= 10, got {}",
            series.truncation()
        )));
    }
    let (slope, tail_window) = slope_of(series.coeffs(), window_fraction)?;
    Ok(DecayReport {
        per_k_valuations: series.coeffs().iter().map(KValuation::of).collect(),
        slope,
        tail_window,
        verdict_floor: level_floor(&series.ctx(), &slope),
    })
}

/// Shortest truncation whose tail window says anything about decay.
pub const MIN_TAIL_TRUNCATION: usize = 10;

/// `1/(2(p-1)p^(n+1))`: half the gap between consecutive radii.
pub fn default_tolerance(ctx: &PrimeContext, n: u32) -> RationalValuation {
    RationalValuation::half_gap(ctx, n)
}

/// `slope >= v(r_n) - tolerance`, read off the tail window.
pub fn member_fn(
    series: &MahlerSeries,
    n: u32,
    tolerance: Option<RationalValuation>,
) -> Result<bool> {
    let ctx = series.ctx();
    let tol = tolerance.unwrap_or_else(|| default_tolerance(&ctx, n));
    let report = decay_slope(series, DEFAULT_WINDOW_FRACTION)?;
    let threshold = RationalValuation::radius(&ctx, n) - tol;
    report.slope.at_least(threshold).ok_or_else(|| {
        PadicError::Indeterminate(format!(
            "tail is zero at precision; slope {} does not decide level {n}",
            report.slope
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn ints(series: &MahlerSeries) -> Vec<BigInt> {
        series
            .coeffs()
            .iter()
            .map(|c| c.to_bigint().unwrap())
            .collect()
    }

    #[test]
    fn identity_function() {
        let f = FunctionTable::from_poly(ctx3(), &IntPoly::from_i64(&[0, 1]), 6, 10).unwrap();
        let c = mahler_coefficients(&f);
        assert_eq!(ints(&c), [0, 1, 0, 0, 0, 0, 0].map(BigInt::from).to_vec());
    }

    #[test]
    fn square_function() {
        let f = FunctionTable::from_poly(ctx3(), &IntPoly::from_i64(&[0, 0, 1]), 5, 10).unwrap();
        let c = mahler_coefficients(&f);
        assert_eq!(ints(&c), [0, 1, 2, 0, 0, 0].map(BigInt::from).to_vec());
    }

    #[test]
    fn basis_functions_are_unit_vectors() {
        let ctx = ctx3();
        for j in 0..8u64 {
            let f = FunctionTable::from_fn(ctx, 8, 12, |x| {
                num_integer::binomial(BigInt::from(x), BigInt::from(j))
            })
            .unwrap();
            let c = ints(&mahler_coefficients(&f));
            for (k, ck) in c.iter().enumerate() {
                assert_eq!(*ck, BigInt::from((k as u64 == j) as i64));
            }
        }
    }

    #[test]
    fn mismatched_table_precision() {
        let ctx = ctx3();
        let vals = vec![
            PadicScalar::from_integer(ctx, 1, 5),
            PadicScalar::from_integer(ctx, 1, 6),
        ];
        assert!(FunctionTable::new(ctx, vals).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let ctx = ctx3();
        let c = MahlerSeries::new(
            ctx,
            [0, 1, 2]
                .iter()
                .map(|&v| PadicScalar::from_integer(ctx, v, 10))
                .collect(),
        )
        .unwrap();
        let nine = evaluate(&c, &PadicScalar::from_integer(ctx, 3, 10)).unwrap();
        assert_eq!(nine.to_bigint().unwrap(), BigInt::from(9));

        let e0 = MahlerSeries::new(ctx, vec![PadicScalar::from_integer(ctx, 5, 10); 1]).unwrap();
        assert_eq!(
            evaluate(&e0, &PadicScalar::from_integer(ctx, 17, 10))
                .unwrap()
                .to_bigint()
                .unwrap(),
            BigInt::from(5)
        );

        let cube =
            FunctionTable::from_poly(ctx, &IntPoly::from_i64(&[0, 0, 0, 1]), 10, 12).unwrap();
        let v = evaluate(
            &mahler_coefficients(&cube),
            &PadicScalar::from_integer(ctx, 7, 20),
        )
        .unwrap();
        assert!(v.eq_mod_precision(&PadicScalar::from_integer(ctx, 343, 12)));
    }

    #[test]
    fn evaluate_needs_precision() {
        let ctx = ctx3();
        let c = MahlerSeries::new(ctx, vec![PadicScalar::from_integer(ctx, 1, 10); 30]).unwrap();
        // floor(log_3 29) = 3
        assert!(evaluate(&c, &PadicScalar::from_integer(ctx, 1, 3)).is_err());
        assert!(evaluate(&c, &PadicScalar::from_integer(ctx, 1, 4)).is_ok());
    }

    /// binom(x, k) mod p^r depends only on x mod p^(r + floor(log_p k)).
    #[test]
    fn binomial_precision_rule_by_enumeration() {
        let ctx = ctx3();
        for k in 1..30u64 {
            let loss = ctx.floor_log(k);
            for r in 1..3u32 {
                let period = 3i64.pow(r + loss);
                let m = BigInt::from(3i64.pow(r));
                for x in 0..period {
                    let a = num_integer::binomial(BigInt::from(x), BigInt::from(k));
                    let b = num_integer::binomial(BigInt::from(x + period), BigInt::from(k));
                    assert_eq!((a - b) % &m, BigInt::zero(), "k={k} r={r} x={x}");
                }
            }
        }
    }

    #[test]
    fn character_examples() {
        let ctx = ctx3();
        let c = character_series(&PadicScalar::zero_at(ctx, 10), 4).unwrap();
        assert_eq!(ints(&c), [1, 0, 0, 0, 0].map(BigInt::from).to_vec());
        let c = character_series(&PadicScalar::from_integer(ctx, 3, 10), 4).unwrap();
        assert_eq!(ints(&c), [1, 3, 9, 27, 81].map(BigInt::from).to_vec());
        let at_two = evaluate(&c, &PadicScalar::from_integer(ctx, 2, 10)).unwrap();
        assert_eq!(at_two.to_bigint().unwrap(), BigInt::from(16));
        assert!(character_series(&PadicScalar::from_integer(ctx, 2, 10), 4).is_err());
    }

    #[test]
    fn slope_of_characters() {
        let ctx = ctx3();
        for j in 1..=3u32 {
            let z = PadicScalar::from_integer(ctx, 3i64.pow(j), 20);
            let r = decay_slope(&character_series(&z, 32).unwrap(), 0.5).unwrap();
            assert_eq!(
                r.slope,
                SlopeEstimate::Finite(RationalValuation::integer(j as i64))
            );
            assert_eq!(r.verdict_floor, Some(0));
            assert_eq!(r.tail_window, (16, 32));
        }
    }

    #[test]
    fn membership_examples() {
        let ctx = ctx3();
        let kappa = character_series(&PadicScalar::from_integer(ctx, 3, 20), 32).unwrap();
        for n in 0..5 {
            assert!(member_fn(&kappa, n, None).unwrap());
        }
        let ones = MahlerSeries::new(ctx, vec![PadicScalar::one(ctx, 20); 33]).unwrap();
        let r = decay_slope(&ones, 0.5).unwrap();
        assert_eq!(r.slope, SlopeEstimate::Finite(RationalValuation::zero()));
        assert_eq!(r.verdict_floor, None);
        assert!(!member_fn(&ones, 0, None).unwrap());
        let zero = MahlerSeries::new(ctx, vec![PadicScalar::zero(ctx); 33]).unwrap();
        assert!(member_fn(&zero, 3, None).unwrap());
    }

    #[test]
    fn polynomial_is_member_through_precision_floor() {
        let ctx = ctx3();
        let f = FunctionTable::from_poly(ctx, &IntPoly::from_i64(&[1, 2, 3]), 32, 20).unwrap();
        let r = decay_slope(&mahler_coefficients(&f), 0.5).unwrap();
        assert_eq!(
            r.slope,
            SlopeEstimate::AtLeast(RationalValuation::new(20, 32))
        );
        assert!(member_fn(&mahler_coefficients(&f), 0, None).unwrap());
        // too little precision to decide
        let f = FunctionTable::from_poly(ctx, &IntPoly::from_i64(&[1, 2, 3]), 32, 4).unwrap();
        assert!(matches!(
            member_fn(&mahler_coefficients(&f), 0, None),
            Err(PadicError::Indeterminate(_))
        ));
    }

    #[test]
    fn slope_needs_ten_terms() {
        let ctx = ctx3();
        let s = MahlerSeries::new(ctx, vec![PadicScalar::one(ctx, 5); 10]).unwrap();
        assert!(decay_slope(&s, 0.5).is_err());
    }

    #[test]
    fn level_floor_thresholds() {
        let ctx = ctx3();
        let f = |s: RationalValuation| level_floor(&ctx, &SlopeEstimate::Finite(s));
        assert_eq!(f(RationalValuation::new(1, 2)), Some(0));
        assert_eq!(f(RationalValuation::new(1, 6)), Some(1));
        assert_eq!(f(RationalValuation::new(1, 7)), Some(2));
        assert_eq!(f(RationalValuation::new(-1, 7)), None);
    }
}
