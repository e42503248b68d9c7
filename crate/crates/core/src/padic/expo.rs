//! Matrix exponential and logarithm over `Z_p` by their power series.
//!
//! Both series are summed in fixed point with exact precision bookkeeping:
//! every term carries the precision produced by the product rule and by the
//! division by `k` (resp. `k!`), and summation stops once every remaining
//! term is provably divisible by `p^N`, `N` the running precision of the sum.

use num_bigint::BigInt;

use super::{PadicMatrix, PadicScalar, PrimeContext};
use crate::error::{PadicError, Result};

/// Upper bound for `v_p(k!)` used in the exp tail estimate: `(k-1)/(p-1)`.
fn factorial_valuation_bound(ctx: &PrimeContext, k: u64) -> i64 {
    if k == 0 {
        return 0;
    }
    ((k - 1) / (ctx.p() as u64 - 1)) as i64
}

/// `exp(a) = sum a^k / k!` for `v(a) >= epsilon`.
pub fn padic_exp(a: &PadicMatrix) -> Result<PadicMatrix> {
    let ctx = a.ctx();
    let eps = ctx.epsilon() as i64;
    let v = a.valuation();
    if v < eps {
        return Err(PadicError::OutsideDomain {
            found: v,
            required: eps,
        });
    }
    let id = PadicMatrix::identity(ctx, a.dim(), a.precision());
    if a.is_zero() {
        return Ok(id);
    }
    let mut sum = id.checked_add(a)?;
    let mut term = a.clone();
    let mut k: u64 = 1;
    loop {
        k += 1;
        // every term from k on has valuation >= k v - v_p(k!), increasing in k
        let tail = (k as i64) * v - factorial_valuation_bound(&ctx, k);
        if tail >= sum.precision() {
            break;
        }
        term = term.checked_mul(a)?;
        let inv_k = PadicScalar::from_rational(ctx, 1, k, term.precision().max(1) + 64)?;
        term = term.scalar_mul(&inv_k)?;
        sum = sum.checked_add(&term)?;
    }
    Ok(sum)
}

/// `log(x) = sum (-1)^(k+1) (x - 1)^k / k` for `x = 1 (mod p^epsilon)`.
pub fn padic_log(x: &PadicMatrix) -> Result<PadicMatrix> {
    let ctx = x.ctx();
    let eps = ctx.epsilon() as i64;
    let id = PadicMatrix::identity(ctx, x.dim(), x.precision());
    let z = x.checked_sub(&id)?;
    let v = z.valuation();
    if v < eps {
        return Err(PadicError::OutsideDomain {
            found: v,
            required: eps,
        });
    }
    if z.is_zero() {
        return Ok(z);
    }
    let mut sum = z.clone();
    let mut power = z.clone();
    let mut k: u64 = 1;
    loop {
        k += 1;
        // k v - floor(log_p k) is increasing in k once v >= 1
        let tail = (k as i64) * v - ctx.floor_log(k) as i64;
        if tail >= sum.precision() {
            break;
        }
        power = power.checked_mul(&z)?;
        let sign = if k.is_multiple_of(2) { -1 } else { 1 };
        let coeff =
            PadicScalar::from_rational(ctx, BigInt::from(sign), k, power.precision().max(1) + 64)?;
        sum = sum.checked_add(&power.scalar_mul(&coeff)?)?;
    }
    Ok(sum)
}

/// Scalar exponential through the `1 x 1` case.
pub fn scalar_exp(a: &PadicScalar) -> Result<PadicScalar> {
    let m = PadicMatrix::from_scalars(a.ctx(), 1, std::slice::from_ref(a))?;
    Ok(padic_exp(&m)?.entry(0, 0))
}

/// Scalar logarithm through the `1 x 1` case.
pub fn scalar_log(x: &PadicScalar) -> Result<PadicScalar> {
    let m = PadicMatrix::from_scalars(x.ctx(), 1, std::slice::from_ref(x))?;
    Ok(padic_log(&m)?.entry(0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn ctx3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    #[test]
    fn exp_of_zero_and_log_of_identity() {
        let ctx = ctx3();
        let z = PadicMatrix::zero(ctx, 2, 8);
        assert!(padic_exp(&z)
            .unwrap()
            .eq_mod_precision(&PadicMatrix::identity(ctx, 2, 8)));
        let l = padic_log(&PadicMatrix::identity(ctx, 2, 8)).unwrap();
        assert!(l.is_zero());
    }

    #[test]
    fn domain_checks() {
        let ctx = ctx3();
        let a = PadicMatrix::from_integers(ctx, 1, &[1], 8).unwrap();
        assert!(matches!(
            padic_exp(&a),
            Err(PadicError::OutsideDomain { .. })
        ));
        let x = PadicMatrix::from_integers(ctx, 1, &[2], 8).unwrap();
        assert!(matches!(
            padic_log(&x),
            Err(PadicError::OutsideDomain { .. })
        ));
        let ctx2 = PrimeContext::new(2).unwrap();
        let a2 = PadicMatrix::from_integers(ctx2, 1, &[2], 8).unwrap();
        assert!(padic_exp(&a2).is_err());
    }

    /// log(1 + 3) summed directly over the rationals, term valuations
    /// `k - v_3(k)` exceed 40 well before k = 60.
    #[test]
    fn log_four_against_rational_series() {
        let ctx = ctx3();
        let mut exact = BigRational::zero();
        let three = BigRational::from_integer(BigInt::from(3));
        let mut pw = BigRational::one();
        for k in 1..60i64 {
            pw = &pw * &three;
            let term = &pw / BigRational::from_integer(BigInt::from(k));
            if k % 2 == 1 {
                exact += term;
            } else {
                exact -= term;
            }
        }
        let oracle =
            PadicScalar::from_rational(ctx, exact.numer().clone(), exact.denom().clone(), 8)
                .unwrap();
        let got = scalar_log(&PadicScalar::from_integer(ctx, 4, 8)).unwrap();
        assert_eq!(got.precision(), 8);
        assert!(got.eq_mod_precision(&oracle), "{got} vs {oracle}");
    }

    #[test]
    fn exp_is_multiplicative_on_commuting_scalars() {
        let ctx = ctx3();
        let three = PadicScalar::from_integer(ctx, 3, 12);
        let six = PadicScalar::from_integer(ctx, 6, 12);
        let e3 = scalar_exp(&three).unwrap();
        let e6 = scalar_exp(&six).unwrap();
        assert!((&e3 * &e3).eq_mod_precision(&e6));
    }

    #[test]
    fn nilpotent_exponential_is_polynomial() {
        let ctx = ctx3();
        // a = 3 * strictly upper triangular, a^3 = 0
        let a = PadicMatrix::from_integers(ctx, 3, &[0, 3, 6, 0, 0, 9, 0, 0, 0], 10).unwrap();
        let a2 = a.checked_mul(&a).unwrap();
        let half = PadicScalar::from_rational(ctx, 1, 2, 40).unwrap();
        let expected = PadicMatrix::identity(ctx, 3, 10)
            .checked_add(&a)
            .unwrap()
            .checked_add(&a2.scalar_mul(&half).unwrap())
            .unwrap();
        assert!(padic_exp(&a).unwrap().eq_mod_precision(&expected));
    }

    #[test]
    fn exp_log_round_trip_small() {
        let ctx = ctx3();
        let a = PadicMatrix::from_integers(ctx, 2, &[3, 6, 9, 12], 10).unwrap();
        let back = padic_log(&padic_exp(&a).unwrap()).unwrap();
        assert!(back.eq_mod_precision(&a));
        assert_eq!(back.precision(), 10);
    }

    #[test]
    fn two_adic_round_trip() {
        let ctx = PrimeContext::new(2).unwrap();
        let a = PadicMatrix::from_integers(ctx, 2, &[4, 8, 12, 4], 16).unwrap();
        let x = padic_exp(&a).unwrap();
        let back = padic_log(&x).unwrap();
        assert!(back.eq_mod_precision(&a), "{back} vs {a}");
    }
}
