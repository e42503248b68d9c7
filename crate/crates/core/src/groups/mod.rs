//! Uniform pro-p groups realized as `H = 1 + p^e M_d(Z_p)` with Lie lattice
//! `L = p^e M_d(Z_p)`, `e` the prime's epsilon. `exp` and `log` are the
//! matrix series.

pub mod bch;
pub mod limits;
pub mod powerful;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{PadicError, Result};
use crate::padic::{padic_exp, padic_log, PadicMatrix, PrimeContext};

pub use bch::{BchSeries, LieAlgebra, MatrixLie};
pub use limits::{
    limit_add, limit_bracket, pth_power, pth_root, zp_scalar_action, ConvergenceTrace,
};
pub use powerful::{powerful_check, PowerfulReport};

/// An element of `H = 1 + p^e M_d(Z_p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    matrix: PadicMatrix,
}

impl GroupElement {
    pub fn new(matrix: PadicMatrix) -> Result<Self> {
        let ctx = matrix.ctx();
        let id = PadicMatrix::identity(ctx, matrix.dim(), matrix.precision());
        let v = matrix.checked_sub(&id)?.valuation();
        if v < ctx.epsilon() as i64 {
            return Err(PadicError::NotInSubgroup(format!(
                "x - 1 has valuation {v} < {}",
                ctx.epsilon()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(ctx: PrimeContext, dim: usize, precision: i64) -> Self {
        Self {
            matrix: PadicMatrix::identity(ctx, dim, precision),
        }
    }

    pub fn matrix(&self) -> &PadicMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> PadicMatrix {
        self.matrix
    }

    pub fn ctx(&self) -> PrimeContext {
        self.matrix.ctx()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn precision(&self) -> i64 {
        self.matrix.precision()
    }

    pub fn log(&self) -> Result<LieElement> {
        Ok(LieElement {
            matrix: padic_log(&self.matrix)?,
        })
    }

    /// `v(x - 1)`, capped at the precision.
    pub fn distance_to_identity(&self) -> i64 {
        let id = PadicMatrix::identity(self.ctx(), self.dim(), self.precision());
        self.matrix
            .checked_sub(&id)
            .expect("same shape")
            .valuation()
    }

    pub fn truncate(&self, precision: i64) -> Self {
        Self {
            matrix: self.matrix.truncate(precision),
        }
    }

    pub fn eq_mod_precision(&self, other: &Self) -> bool {
        self.matrix.eq_mod_precision(&other.matrix)
    }
}

/// An element of `L = p^e M_d(Z_p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    matrix: PadicMatrix,
}

impl LieElement {
    pub fn new(matrix: PadicMatrix) -> Result<Self> {
        let eps = matrix.ctx().epsilon() as i64;
        if matrix.valuation() < eps {
            return Err(PadicError::OutsideDomain {
                found: matrix.valuation(),
                required: eps,
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &PadicMatrix {
        &self.matrix
    }

    pub fn exp(&self) -> Result<GroupElement> {
        Ok(GroupElement {
            matrix: padic_exp(&self.matrix)?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.checked_add(&other.matrix)?,
        })
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.commutator(&other.matrix)?,
        })
    }
}

pub fn group_mul(x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
    Ok(GroupElement {
        matrix: x.matrix.checked_mul(&y.matrix)?,
    })
}

pub fn group_inv(x: &GroupElement) -> Result<GroupElement> {
    Ok(GroupElement {
        matrix: x.matrix.invert()?,
    })
}

/// `x y x^-1 y^-1`.
pub fn group_commutator(x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
    let xy = group_mul(x, y)?;
    let yx = group_mul(y, x)?;
    group_mul(&xy, &group_inv(&yx)?)
}

/// `Phi(X, Y)` truncated at degree `D` for lattice elements.
pub fn bch(x: &LieElement, y: &LieElement, degree: usize) -> Result<LieElement> {
    let series = BchSeries::new(degree)?;
    bch_with(&series, x, y)
}

pub fn bch_with(series: &BchSeries, x: &LieElement, y: &LieElement) -> Result<LieElement> {
    Ok(LieElement {
        matrix: series.evaluate(&MatrixLie, &x.matrix, &y.matrix)?,
    })
}

/// `v(log(xy) - Phi(log x, log y))`, capped at the precision of the difference.
pub fn group_law_check(series: &BchSeries, x: &GroupElement, y: &GroupElement) -> Result<i64> {
    let lhs = group_mul(x, y)?.log()?;
    let rhs = bch_with(series, &x.log()?, &y.log()?)?;
    lhs.matrix.distance_valuation(&rhs.matrix)
}

/// The largest `i` with `x = 1 (mod p^(i + e - 1))`, i.e. `x` in `P_i`;
/// `None` when `x` is the identity at its precision.
pub fn lower_p_series_level(x: &GroupElement) -> Option<i64> {
    let v = x.distance_to_identity();
    if v >= x.precision() {
        return None;
    }
    Some(v - x.ctx().epsilon() as i64 + 1)
}

/// `1 + p^e A` with the entries of `A` uniform in `[0, p^precision)`.
pub fn random_group_element<R: Rng + ?Sized>(
    ctx: PrimeContext,
    dim: usize,
    precision: i64,
    rng: &mut R,
) -> GroupElement {
    let a = random_matrix(ctx, dim, precision, rng).mul_p_power(ctx.epsilon() as i64);
    let id = PadicMatrix::identity(ctx, dim, precision);
    GroupElement::new(id.checked_add(&a).expect("same shape")).expect("in H")
}

pub fn random_lie_element<R: Rng + ?Sized>(
    ctx: PrimeContext,
    dim: usize,
    precision: i64,
    rng: &mut R,
) -> LieElement {
    let a = random_matrix(ctx, dim, precision - ctx.epsilon() as i64, rng)
        .mul_p_power(ctx.epsilon() as i64);
    LieElement::new(a).expect("in L")
}

fn random_matrix<R: Rng + ?Sized>(
    ctx: PrimeContext,
    dim: usize,
    precision: i64,
    rng: &mut R,
) -> PadicMatrix {
    let modulus = ctx.pow(precision as u32);
    let entries: Vec<BigInt> = (0..dim * dim)
        .map(|_| random_below(&modulus, rng))
        .collect();
    PadicMatrix::from_integers(ctx, dim, &entries, precision).expect("square")
}

fn random_below<R: Rng + ?Sized>(modulus: &BigInt, rng: &mut R) -> BigInt {
    // rejection-free enough for our moduli: draw 64 extra bits and reduce
    let bits = modulus.bits() + 64;
    let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
    rng.fill(bytes.as_mut_slice());
    BigInt::from_bytes_le(num_bigint::Sign::Plus, &bytes) % modulus
}

/// Injectivity of `x -> x^p` from `P_i / P_(i+1)` to `P_(i+1) / P_(i+2)` on
/// distinct coset representatives `1 + p^(i+e-1) A`, `A` with entries in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformityAudit {
    pub level: u32,
    pub representatives: usize,
    pub distinct_images: usize,
    /// Every image class equals the class of its representative:
    /// `(1 + p^k A)^p = 1 + p^(k+1) A` modulo `p^(k+2)`.
    pub images_match_representatives: bool,
    pub injective: bool,
}

pub fn uniformity_audit<R: Rng + ?Sized>(
    ctx: PrimeContext,
    dim: usize,
    level: u32,
    samples: usize,
    rng: &mut R,
) -> Result<UniformityAudit> {
    if level == 0 {
        return Err(PadicError::InvalidInput("levels start at 1".into()));
    }
    let p = ctx.p() as u64;
    let k = level as i64 + ctx.epsilon() as i64 - 1;
    let precision = k + 2;
    let cosets = (p as f64).powi((dim * dim) as i32);
    let target = if cosets < samples as f64 {
        cosets as usize
    } else {
        samples
    };
    let mut reps: BTreeSet<Vec<u64>> = BTreeSet::new();
    while reps.len() < target {
        reps.insert((0..dim * dim).map(|_| rng.gen_range(0..p)).collect());
    }
    let id = PadicMatrix::identity(ctx, dim, precision);
    let mut images = BTreeSet::new();
    let mut matches = true;
    for a in &reps {
        let a_mat = PadicMatrix::from_integers(ctx, dim, a, precision)?
            .mul_p_power(k)
            .truncate(precision);
        let x = GroupElement::new(id.checked_add(&a_mat)?)?;
        let y = pth_power(&x, 1)?.truncate(k + 2);
        let diff = y
            .matrix()
            .checked_sub(&PadicMatrix::identity(ctx, dim, k + 2))?;
        let class: Vec<u64> = diff
            .entries()
            .iter()
            .map(|e| {
                if e.valuation_bound() > k + 1 {
                    0
                } else {
                    let n = e.to_bigint().expect("integral");
                    let digit = (n / ctx.pow((k + 1) as u32)) % BigInt::from(p);
                    let digit = if digit < BigInt::zero() {
                        digit + BigInt::from(p)
                    } else {
                        digit
                    };
                    u64::try_from(digit).expect("small")
                }
            })
            .collect();
        matches &= class == *a;
        images.insert(class);
    }
    Ok(UniformityAudit {
        level,
        representatives: reps.len(),
        distinct_images: images.len(),
        images_match_representatives: matches,
        injective: images.len() == reps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn scalar_group(ctx: PrimeContext, n: i64, prec: i64) -> GroupElement {
        GroupElement::new(PadicMatrix::from_integers(ctx, 1, &[n], prec).unwrap()).unwrap()
    }

    #[test]
    fn membership_checks() {
        let ctx = ctx3();
        assert!(GroupElement::new(PadicMatrix::from_integers(ctx, 1, &[2], 5).unwrap()).is_err());
        assert!(LieElement::new(PadicMatrix::from_integers(ctx, 1, &[1], 5).unwrap()).is_err());
        let two = PrimeContext::new(2).unwrap();
        assert!(GroupElement::new(PadicMatrix::from_integers(two, 1, &[3], 8).unwrap()).is_err());
        assert!(GroupElement::new(PadicMatrix::from_integers(two, 1, &[5], 8).unwrap()).is_ok());
    }

    #[test]
    fn multiplication_and_inverse() {
        let ctx = ctx3();
        let four = scalar_group(ctx, 4, 8);
        assert_eq!(group_mul(&four, &four).unwrap(), scalar_group(ctx, 16, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = random_group_element(ctx, 2, 10, &mut rng);
            let y = random_group_element(ctx, 2, 10, &mut rng);
            let xy = group_mul(&x, &y).unwrap();
            assert!(xy.distance_to_identity() >= 1);
            let one = group_mul(&x, &group_inv(&x).unwrap()).unwrap();
            assert!(one.eq_mod_precision(&GroupElement::identity(ctx, 2, 10)));
        }
    }

    #[test]
    fn heisenberg_bch_is_exact() {
        let ctx = ctx3();
        let unit = |i: usize, j: usize| {
            let mut e = vec![0i64; 9];
            e[i * 3 + j] = 3;
            LieElement::new(PadicMatrix::from_integers(ctx, 3, &e, 12).unwrap()).unwrap()
        };
        let (e, f, h) = (unit(0, 1), unit(1, 2), unit(0, 2));
        let half_p = crate::padic::PadicScalar::from_rational(ctx, 3, 2, 12).unwrap();
        let want = e
            .add(&f)
            .unwrap()
            .add(&LieElement::new(h.matrix.scalar_mul(&half_p).unwrap()).unwrap())
            .unwrap();
        for d in [2, 5, 9] {
            let got = bch(&e, &f, d).unwrap();
            assert!(got.matrix.eq_mod_precision(&want.matrix), "{d}");
        }
    }

    #[test]
    fn bch_degree_two_is_half_bracket() {
        let ctx = ctx3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = BchSeries::new(2).unwrap();
        let half = crate::padic::PadicScalar::from_rational(ctx, 1, 2, 30).unwrap();
        for _ in 0..20 {
            let x = random_lie_element(ctx, 3, 12, &mut rng);
            let y = random_lie_element(ctx, 3, 12, &mut rng);
            let got = bch_with(&s, &x, &y).unwrap();
            let want = x
                .add(&y)
                .unwrap()
                .matrix
                .checked_add(&x.bracket(&y).unwrap().matrix.scalar_mul(&half).unwrap())
                .unwrap();
            assert!(got.matrix.eq_mod_precision(&want));
        }
    }

    #[test]
    fn group_law_discrepancy_grows_with_degree() {
        let ctx = ctx3();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_group_element(ctx, 2, 12, &mut rng);
        let y = random_group_element(ctx, 2, 12, &mut rng);
        let low = group_law_check(&BchSeries::new(2).unwrap(), &x, &y).unwrap();
        let high = group_law_check(&BchSeries::new(10).unwrap(), &x, &y).unwrap();
        assert!(high >= low && high >= 5, "{low} {high}");
        let id = GroupElement::identity(ctx, 2, 12);
        assert!(group_law_check(&BchSeries::new(4).unwrap(), &x, &id).unwrap() >= 12);
    }

    #[test]
    fn lower_p_series_levels() {
        let ctx = ctx3();
        assert_eq!(
            lower_p_series_level(&GroupElement::identity(ctx, 2, 8)),
            None
        );
        assert_eq!(lower_p_series_level(&scalar_group(ctx, 4, 8)), Some(1));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let y = random_group_element(ctx, 2, 8, &mut rng);
            if y.distance_to_identity() != 1 {
                continue;
            }
            assert_eq!(lower_p_series_level(&pth_power(&y, 2).unwrap()), Some(3));
        }
        let two = PrimeContext::new(2).unwrap();
        assert_eq!(lower_p_series_level(&scalar_group(two, 5, 8)), Some(1));
        assert_eq!(lower_p_series_level(&scalar_group(two, 9, 8)), Some(2));
    }

    #[test]
    fn uniformity_on_small_levels() {
        let ctx = ctx3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 1..=3 {
            let a = uniformity_audit(ctx, 2, i, 50, &mut rng).unwrap();
            assert_eq!(a.representatives, 50);
            assert!(a.injective && a.images_match_representatives);
        }
        let two = PrimeContext::new(2).unwrap();
        let a = uniformity_audit(two, 2, 1, 50, &mut rng).unwrap();
        assert_eq!(a.representatives, 16);
        assert!(a.injective);
    }
}
