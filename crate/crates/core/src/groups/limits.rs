//! p-th powers and roots, and the limit formulas
//! `x + y = lim (x^(p^t) y^(p^t))^(p^-t)` and
//! `[x, y] = lim [x^(p^t), y^(p^t)]^(p^-2t)` for the Lie structure on `H`.
//!
//! Precision. If `x = 1 (mod p)` is known modulo `p^M`, then `x^p` is known
//! modulo `p^(M+1)`: the first-order change `sum x^a e x^(p-1-a)` is `p e`
//! plus terms carrying a factor `x - 1`. A group commutator `[a, b]` is
//! known modulo `p^min(M_a + v(b-1), M_b + v(a-1))`. The limit approximants
//! are therefore computed on lifted representatives at a generous working
//! precision and then truncated to the certified precision `M`.

use serde::Serialize;

use super::{group_commutator, group_mul, GroupElement, LieElement};
use crate::error::{PadicError, Result};
use crate::padic::{padic_exp, padic_log, PadicMatrix, PadicScalar};

/// `x^(p^i)`, certified modulo `p^(M+i)`.
pub fn pth_power(x: &GroupElement, i: u32) -> Result<GroupElement> {
    let target = x.precision() + i as i64;
    let mut m = x.matrix().lift(target);
    let p = x.ctx().p() as u64;
    for _ in 0..i {
        m = matrix_pow(&m, p)?;
    }
    Ok(GroupElement {
        matrix: m.lift(target),
    })
}

fn matrix_pow(m: &PadicMatrix, mut e: u64) -> Result<PadicMatrix> {
    let mut result = PadicMatrix::identity(m.ctx(), m.dim(), m.precision());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = result.checked_mul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.checked_mul(&base)?;
        }
    }
    Ok(result)
}

/// The unique `x` in `H` with `x^(p^i) = y`, as `exp(log(y) / p^i)`.
/// Requires `y = 1 (mod p^(i+e))`; the result is known modulo `p^(M-i)`.
pub fn pth_root(y: &GroupElement, i: u32) -> Result<GroupElement> {
    let needed = i as i64 + y.ctx().epsilon() as i64;
    if y.distance_to_identity() < needed {
        return Err(PadicError::NotInSubgroup(format!(
            "y is not 1 mod p^{needed}, so it has no p^{i}-th root in H"
        )));
    }
    let log = padic_log(y.matrix())?.divide_by_p(i);
    Ok(GroupElement {
        matrix: padic_exp(&log)?,
    })
}

/// `x^lambda = exp(lambda log x)` for `lambda` in `Z_p`.
pub fn zp_scalar_action(lambda: &PadicScalar, x: &GroupElement) -> Result<GroupElement> {
    if lambda.valuation_bound() < 0 {
        return Err(PadicError::OutsideDomain {
            found: lambda.valuation_bound(),
            required: 0,
        });
    }
    let log = padic_log(x.matrix())?;
    let scaled = log.scalar_mul(lambda)?;
    Ok(GroupElement {
        matrix: padic_exp(&scaled)?,
    })
}

/// Approximants of a limit formula and their distance to an independent
/// candidate for the limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceTrace {
    #[serde(skip)]
    pub approximants: Vec<PadicMatrix>,
    /// `v(approximant_t - candidate)`, capped at `floor`.
    pub discrepancy_valuations: Vec<i64>,
    /// The precision every approximant is certified to.
    pub floor: i64,
    /// First `t` at which the discrepancy reached the floor.
    pub reached_floor_at: Option<usize>,
}

impl ConvergenceTrace {
    pub fn is_nondecreasing(&self) -> bool {
        self.discrepancy_valuations.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn final_discrepancy(&self) -> i64 {
        *self.discrepancy_valuations.last().expect("nonempty")
    }

    fn build(approximants: Vec<PadicMatrix>, candidate: &PadicMatrix, floor: i64) -> Result<Self> {
        let discrepancy_valuations = approximants
            .iter()
            .map(|a| Ok(a.distance_valuation(candidate)?.min(floor)))
            .collect::<Result<Vec<_>>>()?;
        let reached_floor_at = discrepancy_valuations.iter().position(|&d| d >= floor);
        Ok(Self {
            approximants,
            discrepancy_valuations,
            floor,
            reached_floor_at,
        })
    }
}

fn check_pair(x: &GroupElement, y: &GroupElement) -> Result<i64> {
    x.ctx().check_same(&y.ctx())?;
    if x.dim() != y.dim() {
        return Err(PadicError::DimensionMismatch(x.dim(), y.dim()));
    }
    Ok(x.precision().min(y.precision()))
}

fn certify(m: PadicMatrix, floor: i64) -> Result<PadicMatrix> {
    if m.precision() < floor {
        return Err(PadicError::PrecisionExhausted(format!(
            "working precision left {} < {floor}",
            m.precision()
        )));
    }
    Ok(m.truncate(floor))
}

fn lifted(x: &GroupElement, floor: i64, work: i64) -> GroupElement {
    GroupElement {
        matrix: x.matrix().truncate(floor).lift(work),
    }
}

/// `(x^(p^t) y^(p^t))^(p^-t)` modulo `p^M`.
pub fn add_approximant(x: &GroupElement, y: &GroupElement, t: u32) -> Result<PadicMatrix> {
    let floor = check_pair(x, y)?;
    let work = floor + 2 * t as i64 + 8;
    let (xl, yl) = (lifted(x, floor, work), lifted(y, floor, work));
    let z = group_mul(&pth_power(&xl, t)?, &pth_power(&yl, t)?)?;
    let root = padic_exp(&padic_log(z.matrix())?.divide_by_p(t))?;
    certify(root, floor)
}

/// `[x^(p^t), y^(p^t)]^(p^-2t)` modulo `p^M`.
pub fn bracket_approximant(x: &GroupElement, y: &GroupElement, t: u32) -> Result<PadicMatrix> {
    let floor = check_pair(x, y)?;
    let work = floor + 3 * t as i64 + 8;
    let (xl, yl) = (lifted(x, floor, work), lifted(y, floor, work));
    let c = group_commutator(&pth_power(&xl, t)?, &pth_power(&yl, t)?)?;
    let root = padic_exp(&padic_log(c.matrix())?.divide_by_p(2 * t))?;
    certify(root, floor)
}

/// Approximants for `t = 0..=t_max` against the candidate `exp(log x + log y)`.
pub fn limit_add(
    x: &GroupElement,
    y: &GroupElement,
    t_max: u32,
) -> Result<(GroupElement, ConvergenceTrace)> {
    let floor = check_pair(x, y)?;
    let candidate = padic_exp(&padic_log(x.matrix())?.checked_add(&padic_log(y.matrix())?)?)?;
    let approximants = (0..=t_max)
        .map(|t| add_approximant(x, y, t))
        .collect::<Result<Vec<_>>>()?;
    let trace = ConvergenceTrace::build(approximants, &candidate, floor)?;
    let last = GroupElement::new(trace.approximants.last().expect("nonempty").clone())?;
    Ok((last, trace))
}

/// Approximants for `t = 0..=t_max` against the candidate `exp([log x, log y])`.
pub fn limit_bracket(
    x: &GroupElement,
    y: &GroupElement,
    t_max: u32,
) -> Result<(GroupElement, ConvergenceTrace)> {
    let floor = check_pair(x, y)?;
    let lx = LieElement::new(padic_log(x.matrix())?)?;
    let ly = LieElement::new(padic_log(y.matrix())?)?;
    let candidate = padic_exp(lx.bracket(&ly)?.matrix())?;
    let approximants = (0..=t_max)
        .map(|t| bracket_approximant(x, y, t))
        .collect::<Result<Vec<_>>>()?;
    let trace = ConvergenceTrace::build(approximants, &candidate, floor)?;
    let last = GroupElement::new(trace.approximants.last().expect("nonempty").clone())?;
    Ok((last, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{random_group_element, GroupElement};
    use crate::padic::PrimeContext;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn scalar(ctx: PrimeContext, n: i64, prec: i64) -> GroupElement {
        GroupElement::new(PadicMatrix::from_integers(ctx, 1, &[n], prec).unwrap()).unwrap()
    }

    #[test]
    fn power_and_root_examples() {
        let ctx = ctx3();
        let four = scalar(ctx, 4, 10);
        assert_eq!(pth_power(&four, 0).unwrap(), four);
        let cube = pth_power(&four, 1).unwrap();
        assert_eq!(cube.precision(), 11);
        assert_eq!(cube.matrix().entry(0, 0).to_bigint().unwrap(), 64.into());
        let root = pth_root(&cube, 1).unwrap();
        assert!(root.eq_mod_precision(&four.truncate(root.precision())));
        assert!(root.precision() >= 9);
        let id = GroupElement::identity(ctx, 2, 10);
        assert!(pth_root(&id, 2).unwrap().eq_mod_precision(&id));
        assert!(pth_root(&four, 1).is_err());
    }

    #[test]
    fn random_powers_land_in_the_right_level() {
        let ctx = ctx3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = random_group_element(ctx, 2, 10, &mut rng);
            let y = pth_power(&x, 1).unwrap();
            assert!(y.distance_to_identity() >= 2);
            let back = pth_root(&y, 1).unwrap();
            assert!(back.eq_mod_precision(&x.truncate(back.precision())));
        }
    }

    #[test]
    fn scalar_action() {
        let ctx = ctx3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_group_element(ctx, 2, 10, &mut rng);
        let zero = PadicScalar::zero_at(ctx, 10);
        assert!(zp_scalar_action(&zero, &x)
            .unwrap()
            .eq_mod_precision(&GroupElement::identity(ctx, 2, 10)));
        let two = PadicScalar::from_integer(ctx, 2, 10);
        assert!(zp_scalar_action(&two, &x)
            .unwrap()
            .eq_mod_precision(&group_mul(&x, &x).unwrap()));
        let half = PadicScalar::from_rational(ctx, 1, 2, 10).unwrap();
        let h = zp_scalar_action(&half, &x).unwrap();
        assert!(group_mul(&h, &h).unwrap().eq_mod_precision(&x));
    }

    #[test]
    fn commuting_limits_are_exact() {
        let ctx = ctx3();
        let x = GroupElement::new(PadicMatrix::from_integers(ctx, 2, &[4, 0, 0, 7], 10).unwrap())
            .unwrap();
        let y = GroupElement::new(PadicMatrix::from_integers(ctx, 2, &[10, 0, 0, -2], 10).unwrap())
            .unwrap();
        let (_, add) = limit_add(&x, &y, 4).unwrap();
        assert_eq!(add.reached_floor_at, Some(0));
        assert!(add.discrepancy_valuations.iter().all(|&d| d == 10));
        let (br, trace) = limit_bracket(&x, &y, 4).unwrap();
        assert_eq!(trace.reached_floor_at, Some(0));
        assert!(br.eq_mod_precision(&GroupElement::identity(ctx, 2, 10)));
        let (_, with_id) = limit_add(&x, &GroupElement::identity(ctx, 2, 10), 3).unwrap();
        assert!(with_id
            .approximants
            .iter()
            .all(|a| a.eq_mod_precision(x.matrix())));
        let (_, self_br) = limit_bracket(&x, &x, 3).unwrap();
        assert!(self_br
            .approximants
            .iter()
            .all(|a| a.eq_mod_precision(&PadicMatrix::identity(ctx, 2, 10))));
    }

    #[test]
    fn noncommuting_limits_converge() {
        let ctx = ctx3();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..3 {
            let x = random_group_element(ctx, 2, 12, &mut rng);
            let y = random_group_element(ctx, 2, 12, &mut rng);
            let (sum, add) = limit_add(&x, &y, 12).unwrap();
            assert!(add.is_nondecreasing(), "{:?}", add.discrepancy_valuations);
            assert!(add.final_discrepancy() >= 10);
            let (sum_yx, _) = limit_add(&y, &x, 12).unwrap();
            assert!(sum.eq_mod_precision(&sum_yx));
            let (_, br) = limit_bracket(&x, &y, 12).unwrap();
            assert!(br.is_nondecreasing(), "{:?}", br.discrepancy_valuations);
            assert!(br.final_discrepancy() >= 10);
        }
    }
}
