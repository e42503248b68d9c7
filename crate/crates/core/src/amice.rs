//! Distributions on `Z_p` in Amice coordinates `F = sum d_k T^k` with
//! `d_k = lambda(binom(x, k))`, their pairing with Mahler series, the
//! overconvergence test for `G_n`, and coefficient norms in `D^(m)_n`.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{PadicError, Result};
use crate::mahler::{
    slope_of, KValuation, MahlerSeries, SlopeEstimate, DEFAULT_WINDOW_FRACTION, MIN_TAIL_TRUNCATION,
};
use crate::padic::{PadicScalar, PrimeContext, RationalValuation, SeriesVariable, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmiceSeries(TruncatedSeries);

impl AmiceSeries {
    pub fn new(ctx: PrimeContext, coeffs: Vec<PadicScalar>) -> Result<Self> {
        Ok(Self(TruncatedSeries::new(ctx, SeriesVariable::T, coeffs)?))
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

/// Generalized binomial coefficients `binom(a, 0..=k_max)` for any integer `a`.
pub fn generalized_binomials(a: i64, k_max: usize) -> Vec<BigInt> {
    let a = BigInt::from(a);
    let mut out = Vec::with_capacity(k_max + 1);
    let mut b = BigInt::one();
    for k in 0..=k_max {
        if k > 0 {
            b = b * (&a - BigInt::from(k - 1)) / BigInt::from(k);
        }
        out.push(b.clone());
    }
    out
}

/// `(1 + T)^a` truncated after `T^K`. Vanishing coefficients are exact zeros.
pub fn amice_of_dirac(ctx: PrimeContext, a: i64, k_max: usize, precision: i64) -> AmiceSeries {
    let coeffs = generalized_binomials(a, k_max)
        .into_iter()
        .map(|b| {
            if b.is_zero() {
                PadicScalar::zero(ctx)
            } else {
                PadicScalar::from_integer(ctx, b, precision)
            }
        })
        .collect();
    AmiceSeries::new(ctx, coeffs).expect("same prime")
}

pub fn convolve(lambda: &AmiceSeries, mu: &AmiceSeries) -> Result<AmiceSeries> {
    Ok(AmiceSeries(lambda.0.mul_truncated(&mu.0)?))
}

/// `<lambda, f> = sum_k c_k d_k`.
pub fn pair(lambda: &AmiceSeries, f: &MahlerSeries) -> Result<PadicScalar> {
    let ctx = lambda.ctx();
    ctx.check_same(&f.ctx())?;
    if lambda.truncation() != f.truncation() {
        return Err(PadicError::TruncationMismatch(
            lambda.truncation(),
            f.truncation(),
        ));
    }
    let mut acc = PadicScalar::zero(ctx);
    for (d, c) in lambda.coeffs().iter().zip(f.coeffs()) {
        acc = &acc + &(d * c);
    }
    Ok(acc)
}

/// Exact rational coefficients of `log(1 + T)` up to `T^K`.
fn log_one_plus_t(k_max: usize) -> Vec<BigRational> {
    (0..=k_max)
        .map(|k| {
            if k == 0 {
                BigRational::zero()
            } else {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                BigRational::new(BigInt::from(sign), BigInt::from(k))
            }
        })
        .collect()
}

fn rational_series_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len();
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b[..n - i].iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn from_rationals(ctx: PrimeContext, coeffs: &[BigRational], relative: i64) -> AmiceSeries {
    let coeffs = coeffs
        .iter()
        .map(|q| PadicScalar::from_big_rational(ctx, q, relative))
        .collect();
    AmiceSeries::new(ctx, coeffs).expect("same prime")
}

/// The distribution `f -> f'(0)`, whose Amice transform is `log(1 + T)`.
/// Each `(-1)^(k+1)/k` is stored at relative precision `relative`, so the
/// division by `k` costs nothing beyond the valuation `-v(k)` it creates.
pub fn derivative_distribution(
    ctx: PrimeContext,
    k_max: usize,
    relative: i64,
) -> Result<AmiceSeries> {
    if k_max < 1 {
        return Err(PadicError::InvalidInput(
            "the derivative needs K >= 1".into(),
        ));
    }
    Ok(from_rationals(ctx, &log_one_plus_t(k_max), relative))
}

/// Amice transform of `sum_i a_i d^i` where `d` is the derivative at 0:
/// `sum_i a_i log(1 + T)^i`, computed over `Q` and then read p-adically.
pub fn derivation_to_amice(
    ctx: PrimeContext,
    a: &[BigRational],
    k_max: usize,
    relative: i64,
) -> AmiceSeries {
    let log = log_one_plus_t(k_max);
    let mut power = vec![BigRational::zero(); k_max + 1];
    power[0] = BigRational::one();
    let mut acc = vec![BigRational::zero(); k_max + 1];
    // log(1+T)^i starts at T^i, so terms past K contribute nothing
    for ai in a.iter().take(k_max + 1) {
        if !ai.is_zero() {
            for (s, t) in acc.iter_mut().zip(&power) {
                *s += ai * t;
            }
        }
        power = rational_series_mul(&power, &log);
    }
    from_rationals(ctx, &acc, relative)
}

pub fn default_tolerance(ctx: &PrimeContext, n: u32) -> RationalValuation {
    RationalValuation::half_gap(ctx, n)
}

/// Overconvergence beyond `r_n`: `slope > -v(r_n) + tolerance`.
pub fn member_gn(
    lambda: &AmiceSeries,
    n: u32,
    tolerance: Option<RationalValuation>,
) -> Result<(bool, SlopeEstimate)> {
    if lambda.truncation() < MIN_TAIL_TRUNCATION {
        return Err(PadicError::InvalidInput(format!(
            "overconvergence needs K >= 10, got {}",
            lambda.truncation()
        )));
    }
    let ctx = lambda.ctx();
    let tol = tolerance.unwrap_or_else(|| default_tolerance(&ctx, n));
    let (slope, _) = slope_of(lambda.coeffs(), DEFAULT_WINDOW_FRACTION)?;
    let threshold = tol - RationalValuation::radius(&ctx, n);
    match slope.greater_than(threshold) {
        Some(verdict) => Ok((verdict, slope)),
        None => Err(PadicError::Indeterminate(format!(
            "tail is zero at precision; slope {slope} does not decide level {n}"
        ))),
    }
}

/// Coefficients `b_i` of `sum_i a_i d^i = sum_i b_i (q_i! / i!) (p^n d)^i`
/// with `q_i = floor(i / p^m)`, recorded through their valuations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DmnReport {
    pub m: u32,
    pub n: u32,
    pub b_valuations: Vec<KValuation>,
    /// `min_i v(b_i)`; `None` when every `b_i` is exactly zero.
    pub norm_valuation: Option<i64>,
    pub member: bool,
}

/// `v(i!) - v(floor(i / p^m)!)`.
pub fn divided_power_valuation(ctx: &PrimeContext, i: u64, m: u32) -> i64 {
    let q = i / (ctx.p() as u64).pow(m);
    ctx.legendre_valuation(i) as i64 - ctx.legendre_valuation(q) as i64
}

/// Tail test for `v(b_i) -> infinity`: the upper half of the range is split
/// into two blocks, and the later block's minimum must exceed the earlier's.
pub fn tail_grows(vals: &[KValuation]) -> bool {
    let len = vals.len();
    if len < 4 {
        return vals.iter().all(|v| matches!(v, KValuation::Infinite));
    }
    let lo = len / 2;
    let mid = lo + (len - lo) / 2;
    let block_min = |r: &[KValuation]| r.iter().filter_map(KValuation::bound).min();
    match (block_min(&vals[lo..mid]), block_min(&vals[mid..])) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => b > a,
    }
}

pub fn dmn_report(a: &[PadicScalar], m: u32, n: u32) -> Result<DmnReport> {
    let ctx = match a.first() {
        Some(x) => x.ctx(),
        None => return Err(PadicError::InvalidInput("no coefficients".into())),
    };
    let mut b_valuations = Vec::with_capacity(a.len());
    for (i, ai) in a.iter().enumerate() {
        ctx.check_same(&ai.ctx())?;
        let shift = divided_power_valuation(&ctx, i as u64, m) - n as i64 * i as i64;
        b_valuations.push(match KValuation::of(ai) {
            KValuation::Exact(v) => KValuation::Exact(v + shift),
            KValuation::AtLeast(v) => KValuation::AtLeast(v + shift),
            KValuation::Infinite => KValuation::Infinite,
        });
    }
    let norm_valuation = b_valuations.iter().filter_map(KValuation::bound).min();
    let member = tail_grows(&b_valuations);
    Ok(DmnReport {
        m,
        n,
        b_valuations,
        norm_valuation,
        member,
    })
}

/// Smallest `m <= m_max` at which `dmn_report` reports membership.
pub fn smallest_member_level(a: &[PadicScalar], n: u32, m_max: u32) -> Result<Option<u32>> {
    for m in 0..=m_max {
        if dmn_report(a, m, n)?.member {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `p^e` at relative precision `relative`, for any integer `e`.
pub fn p_power(ctx: PrimeContext, e: i64, relative: i64) -> PadicScalar {
    PadicScalar::from_scaled(ctx, BigInt::one(), e, e + relative)
}

/// `c_k = p^ceil(k v(r_n))`: a Mahler series on the boundary of `F_n`.
pub fn boundary_function_family(
    ctx: PrimeContext,
    n: u32,
    k_max: usize,
    relative: i64,
) -> MahlerSeries {
    let r = RationalValuation::radius(&ctx, n);
    let coeffs = (0..=k_max as i64)
        .map(|k| p_power(ctx, (r * k).ceil(), relative))
        .collect();
    MahlerSeries::new(ctx, coeffs).expect("same prime")
}

/// `d_k = p^-floor(k v(r_n) / 2)`: overconvergent beyond `r_n`, not integral.
pub fn overconvergent_distribution_family(
    ctx: PrimeContext,
    n: u32,
    k_max: usize,
    relative: i64,
) -> AmiceSeries {
    let r = RationalValuation::radius(&ctx, n);
    let coeffs = (0..=k_max as i64)
        .map(|k| {
            let e = Ratio::new(r.numer() * k, r.denom() * 2)
                .floor()
                .to_integer();
            p_power(ctx, -e, relative)
        })
        .collect();
    AmiceSeries::new(ctx, coeffs).expect("same prime")
}

/// Number of blocks the upper half of the tail range is cut into.
pub const DUALITY_BLOCKS: usize = 4;

/// Convergence of the pairing series `sum c_k d_k`, read off its tails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub n: u32,
    pub slope_f: SlopeEstimate,
    pub slope_lambda: SlopeEstimate,
    pub f_in_fn: Option<bool>,
    pub lambda_in_gn: Option<bool>,
    /// `v(sum_{j > k} c_j d_j)` for `k = 0..K-1`.
    pub tail_valuations: Vec<KValuation>,
    /// Smallest `C` with `tail(k) >= k (s_f + s_lambda) - C` on the tail window.
    pub fitted_constant: Option<RationalValuation>,
    pub window: (usize, usize),
    /// Minimum tail valuation on each of the blocks of the upper half.
    pub block_minima: Vec<Option<i64>>,
    /// The block minima increase strictly.
    pub monotone_divergence: bool,
}

fn slope_value(s: &SlopeEstimate) -> Option<RationalValuation> {
    match s {
        SlopeEstimate::Finite(v) | SlopeEstimate::AtLeast(v) => Some(*v),
        SlopeEstimate::Infinite => None,
    }
}

pub fn duality_convergence(
    lambda: &AmiceSeries,
    f: &MahlerSeries,
    n: u32,
) -> Result<DualityReport> {
    let ctx = lambda.ctx();
    ctx.check_same(&f.ctx())?;
    let k_max = f.truncation();
    if lambda.truncation() != k_max {
        return Err(PadicError::TruncationMismatch(lambda.truncation(), k_max));
    }
    if k_max < MIN_TAIL_TRUNCATION {
        return Err(PadicError::InvalidInput(
            "duality tails need K >= 10".into(),
        ));
    }
    let (slope_f, window) = slope_of(f.coeffs(), DEFAULT_WINDOW_FRACTION)?;
    let (slope_lambda, _) = slope_of(lambda.coeffs(), DEFAULT_WINDOW_FRACTION)?;
    let radius = RationalValuation::radius(&ctx, n);
    let f_in_fn = slope_f.at_least(radius);
    let lambda_in_gn = slope_lambda.greater_than(-radius);

    let mut tails = vec![KValuation::Infinite; k_max];
    let mut acc = PadicScalar::zero(ctx);
    for k in (0..k_max).rev() {
        acc = &acc + &(&f.coeffs()[k + 1] * &lambda.coeffs()[k + 1]);
        tails[k] = KValuation::of(&acc);
    }

    let total = match (slope_value(&slope_f), slope_value(&slope_lambda)) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    let fitted_constant = total.and_then(|s| {
        (window.0..k_max)
            .filter_map(|k| {
                tails[k]
                    .bound()
                    .map(|t| s * k as i64 - RationalValuation::integer(t))
            })
            .max()
    });

    let upper = &tails[k_max / 2..];
    let block = upper.len().div_ceil(DUALITY_BLOCKS);
    let block_minima: Vec<Option<i64>> = upper
        .chunks(block)
        .map(|c| c.iter().filter_map(KValuation::bound).min())
        .collect();
    let monotone_divergence = block_minima.windows(2).all(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) => b > a,
        (_, None) => true,
        (None, Some(_)) => false,
    });
    Ok(DualityReport {
        n,
        slope_f,
        slope_lambda,
        f_in_fn,
        lambda_in_gn,
        tail_valuations: tails,
        fitted_constant,
        window,
        block_minima,
        monotone_divergence,
    })
}

/// Exact tails `sum_{j > k} c_j d_j` over `Q`, used as an independent check
/// of [`duality_convergence`] on families with exact coefficients.
pub fn exact_tail_valuations(
    ctx: &PrimeContext,
    c: &[BigRational],
    d: &[BigRational],
) -> Vec<Option<i64>> {
    let k_max = c.len() - 1;
    let mut out = vec![None; k_max];
    let mut acc = BigRational::zero();
    for k in (0..k_max).rev() {
        acc += &c[k + 1] * &d[k + 1];
        out[k] = if acc.is_zero() {
            None
        } else {
            let (vn, _) = ctx.split_big(&acc.numer().abs()).expect("nonzero");
            let (vd, _) = ctx.split_big(acc.denom()).expect("nonzero");
            Some(vn as i64 - vd as i64)
        };
    }
    out
}
