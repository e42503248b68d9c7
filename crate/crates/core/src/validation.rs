//! The acceptance suite: one function per criterion, each returning a
//! [`CriterionReport`] with a pass flag, a one-line summary and structured
//! details. Every random draw comes from a ChaCha stream seeded by the
//! suite seed and the criterion number.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::amice::{
    amice_of_dirac, boundary_function_family, convolve, derivative_distribution,
    divided_power_valuation, dmn_report, duality_convergence, exact_tail_valuations,
    overconvergent_distribution_family, p_power, pair,
};
use crate::binomial::{
    audit_sweep, binomial_valuation, default_depth, lemma61_formula, lemma61_oracle,
};
use crate::error::Result;
use crate::groups::bch::BchSeries;
use crate::groups::limits::{limit_add, limit_bracket};
use crate::groups::powerful::{heisenberg_basis, matrix_lattice_basis, powerful_check};
use crate::groups::{
    group_law_check, group_mul, random_group_element, uniformity_audit, GroupElement,
};
use crate::hopf::{coassociativity_check, integrality_report, phi_coordinates, StructureConstants};
use crate::mahler::{
    character_series, decay_slope, evaluate, mahler_coefficients, member_fn, FunctionTable,
    KValuation, MahlerSeries, SlopeEstimate,
};
use crate::padic::{PadicScalar, PrimeContext, RationalValuation};
use crate::poly::IntPoly;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub summary: String,
    pub elapsed_ms: u128,
    pub details: Value,
}

impl CriterionReport {
    /// `[PASS] 3 character decay: ...`
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.summary,
            self.elapsed_ms
        )
    }
}

fn rng_for(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((id as u64) << 56))
}

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).expect("prime")
}

fn timed(
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    body: impl FnOnce() -> Result<(bool, String, Value)>,
) -> CriterionReport {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (mut passed, mut summary, details) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}"), Value::Null),
    };
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            summary = format!("{summary}; over the {} s budget", b.as_secs());
        }
    }
    CriterionReport {
        id,
        title,
        passed,
        summary,
        elapsed_ms: elapsed.as_millis(),
        details,
    }
}

/// Binomial valuation audit: the residue search against the closed form.
pub fn binomial_audit(_seed: u64) -> CriterionReport {
    timed(
        1,
        "binomial valuation audit",
        Some(Duration::from_secs(60)),
        || {
            let mut rows_total = 0;
            let mut disagreements = 0;
            let mut bad_witnesses = 0;
            let mut cells = Vec::new();
            for p in [3u64, 5] {
                let c = ctx(p);
                for n in 0..2u32 {
                    let kmax = p.pow(n + 2) - 1;
                    let depth = default_depth(n);
                    let rows = audit_sweep(&c, n, kmax, depth)?;
                    // the single-k search must agree with the sweep on a spread of k
                    for k in (0..=kmax).step_by((kmax as usize / 6).max(1)) {
                        let single = lemma61_oracle(n, k, &c, depth)?;
                        if single.min_valuation != rows[k as usize].oracle_valuation {
                            disagreements += 1;
                        }
                    }
                    for r in &rows {
                        rows_total += 1;
                        if !r.agrees || lemma61_formula(n, r.k, &c) != RationalValuation::zero() {
                            disagreements += 1;
                        }
                        let a = r.witness_b as i128 + (p as i128).pow(n + 1) * r.witness_c as i128;
                        if binomial_valuation(a, r.k, &c) != Some(r.oracle_valuation) {
                            bad_witnesses += 1;
                        }
                    }
                    cells.push(json!({"p": p, "n": n, "rows": rows.len(),
                    "agree": rows.iter().filter(|r| r.agrees).count()}));
                }
            }
            let passed = disagreements == 0 && bad_witnesses == 0;
            Ok((
            passed,
            format!("{rows_total} rows, {disagreements} disagreements, {bad_witnesses} bad witnesses"),
            json!({"cells": cells}),
        ))
        },
    )
}

/// Mahler coefficients of random polynomials reproduce the polynomial.
pub fn mahler_reconstruction(seed: u64) -> CriterionReport {
    timed(
        2,
        "mahler reconstruction",
        Some(Duration::from_secs(10)),
        || {
            let c = ctx(3);
            let mut rng = rng_for(seed, 2);
            let (precision, k_max) = (20, 32);
            let mut failures = 0;
            for _ in 0..50 {
                let f = IntPoly::random(&mut rng, 10, 10_000);
                let series =
                    mahler_coefficients(&FunctionTable::from_poly(c, &f, k_max, precision)?);
                for x in 0..32i64 {
                    let got = evaluate(&series, &PadicScalar::from_integer(c, x, precision))?;
                    let want = PadicScalar::from_integer(c, f.eval_i64(x), precision);
                    if !got.eq_mod_precision(&want) || got.precision() < precision - 3 {
                        failures += 1;
                    }
                }
            }
            Ok((
                failures == 0,
                format!("50 polynomials x 32 points, {failures} mismatches"),
                json!({"failures": failures}),
            ))
        },
    )
}

/// Decay slope of `kappa_z` for `z = p^j` and the level verdicts.
pub fn character_decay(_seed: u64) -> CriterionReport {
    timed(3, "character decay", None, || {
        let mut mismatches = Vec::new();
        let mut checked = 0;
        for p in [3u64, 5] {
            let c = ctx(p);
            for j in 1..=3i64 {
                let z = PadicScalar::from_integer(c, (p as i64).pow(j as u32), 20);
                let series = character_series(&z, 32)?;
                let slope = decay_slope(&series, 0.5)?.slope;
                checked += 1;
                if slope != SlopeEstimate::Finite(RationalValuation::integer(j)) {
                    mismatches.push(format!("p={p} j={j}: slope {slope}"));
                }
                for n in 0..=4 {
                    let expected =
                        RationalValuation::integer(j) >= RationalValuation::radius(&c, n);
                    checked += 1;
                    if member_fn(&series, n, None)? != expected {
                        mismatches.push(format!("p={p} j={j} n={n}"));
                    }
                }
            }
        }
        Ok((
            mismatches.is_empty(),
            format!(
                "{checked} slope and level verdicts, {} mismatches",
                mismatches.len()
            ),
            json!({"mismatches": mismatches}),
        ))
    })
}

fn mahler_of(c: PrimeContext, f: &IntPoly, k_max: usize, precision: i64) -> Result<MahlerSeries> {
    Ok(mahler_coefficients(&FunctionTable::from_poly(
        c, f, k_max, precision,
    )?))
}

/// Pairing Dirac and derivative distributions against Mahler series.
pub fn duality_pairing(seed: u64) -> CriterionReport {
    timed(4, "duality pairing", None, || {
        let c = ctx(3);
        let mut rng = rng_for(seed, 4);
        let (precision, k_max) = (30, 32);
        let mut dirac_fail = 0;
        let mut deriv_fail = 0;
        let derivative = derivative_distribution(c, k_max, precision)?;
        for _ in 0..20 {
            let f = IntPoly::random(&mut rng, 10, 1000);
            let series = mahler_of(c, &f, k_max, precision)?;
            for a in -16..=16i64 {
                let got = pair(&amice_of_dirac(c, a, k_max, precision), &series)?;
                if !got.eq_mod_precision(&PadicScalar::from_integer(c, f.eval_i64(a), precision)) {
                    dirac_fail += 1;
                }
            }
            let got = pair(&derivative, &series)?;
            let want = f.derivative().eval_i64(0);
            if !got.eq_mod_precision(&PadicScalar::from_integer(c, want, precision))
                || got.precision() < 20
            {
                deriv_fail += 1;
            }
        }
        Ok((
            dirac_fail == 0 && deriv_fail == 0,
            format!("20 polynomials: {dirac_fail} Dirac mismatches over a in [-16, 16], {deriv_fail} derivative mismatches"),
            json!({"dirac_failures": dirac_fail, "derivative_failures": deriv_fail}),
        ))
    })
}

/// `delta_a * delta_b = delta_(a+b)` on Amice transforms.
pub fn convolution_law(seed: u64) -> CriterionReport {
    timed(5, "convolution group law", None, || {
        let c = ctx(3);
        let mut rng = rng_for(seed, 5);
        let mut failures = 0;
        for _ in 0..100 {
            let a = rng.gen_range(-10_000..=10_000i64);
            let b = rng.gen_range(-10_000..=10_000i64);
            let prod = convolve(&amice_of_dirac(c, a, 32, 20), &amice_of_dirac(c, b, 32, 20))?;
            if !prod.eq_mod_precision(&amice_of_dirac(c, a + b, 32, 20)) {
                failures += 1;
            }
        }
        Ok((
            failures == 0,
            format!("100 pairs, {failures} mismatches"),
            json!({"failures": failures}),
        ))
    })
}

/// `v(i!)` from the definition, for the oracle side of the tower check.
fn factorial_valuation_direct(c: &PrimeContext, i: u64) -> i64 {
    (1..=i)
        .map(|j| c.valuation_u64(j).unwrap_or(0) as i64)
        .sum()
}

/// Divided-power norms of `sum p^((n+1) i) d^i` and `sum p^(n i) d^i`.
pub fn dmn_tower(_seed: u64) -> CriterionReport {
    timed(6, "divided-power tower", None, || {
        let len = 201usize;
        let m_max = 4u32;
        let mut membership_fail = Vec::new();
        let mut valuation_fail = 0;
        let mut boundary = Vec::new();
        for p in [3u64, 5] {
            let c = ctx(p);
            for n in 0..2u32 {
                for (shift, label) in [(1i64, "(n+1)i"), (0, "ni")] {
                    let a: Vec<PadicScalar> = (0..len)
                        .map(|i| p_power(c, (n as i64 + shift) * i as i64, 40))
                        .collect();
                    let mut first_member = None;
                    for m in 0..=m_max {
                        let r = dmn_report(&a, m, n)?;
                        let q = (p).pow(m);
                        for (i, b) in r.b_valuations.iter().enumerate() {
                            let i = i as u64;
                            let oracle = shift * i as i64 + factorial_valuation_direct(&c, i)
                                - factorial_valuation_direct(&c, i / q);
                            if *b != KValuation::Exact(oracle)
                                || oracle - shift * i as i64 != divided_power_valuation(&c, i, m)
                            {
                                valuation_fail += 1;
                            }
                        }
                        if r.member && first_member.is_none() {
                            first_member = Some(m);
                        }
                        if shift == 1 && !r.member {
                            membership_fail.push(format!("p={p} n={n} m={m}"));
                        }
                    }
                    if shift == 0 {
                        // not a member at m = 0, a member once divided powers kick in
                        if first_member != Some(1) {
                            membership_fail.push(format!(
                                "p={p} n={n} {label}: first member at {first_member:?}"
                            ));
                        }
                    }
                    boundary.push(
                        json!({"p": p, "n": n, "family": label, "smallest_member_m": first_member}),
                    );
                }
            }
        }
        Ok((
            membership_fail.is_empty() && valuation_fail == 0,
            format!(
                "i <= 200, m <= {m_max}: {valuation_fail} b-valuation mismatches, {} membership failures",
                membership_fail.len()
            ),
            json!({"membership_failures": membership_fail, "families": boundary}),
        ))
    })
}

fn random_pairs(
    seed: u64,
    id: u8,
    dim: usize,
    count: usize,
    precision: i64,
) -> Vec<(GroupElement, GroupElement)> {
    let c = ctx(3);
    let mut rng = rng_for(seed ^ dim as u64, id);
    (0..count)
        .map(|_| {
            (
                random_group_element(c, dim, precision, &mut rng),
                random_group_element(c, dim, precision, &mut rng),
            )
        })
        .collect()
}

pub const BCH_TARGET: i64 = 8;

/// Truncated BCH against `log(exp X exp Y)` on random matrix pairs.
pub fn bch_group_law(seed: u64) -> CriterionReport {
    timed(7, "BCH group law", Some(Duration::from_secs(60)), || {
        let (precision, degree) = (12, 10);
        let series = BchSeries::new(degree)?;
        let mut per_dim = Vec::new();
        let mut worst = i64::MAX;
        for dim in [2usize, 3] {
            let pairs = random_pairs(seed, 7, dim, 100, precision);
            let d: Vec<i64> = pairs
                .par_iter()
                .map(|(x, y)| group_law_check(&series, x, y))
                .collect::<Result<_>>()?;
            let min = *d.iter().min().expect("nonempty");
            let below = d.iter().filter(|&&v| v < BCH_TARGET).count();
            worst = worst.min(min);
            per_dim.push(json!({"dim": dim, "min_discrepancy": min, "pairs_below_target": below}));
        }
        Ok((
            worst >= BCH_TARGET,
            format!("degree {degree}, precision {precision}: min discrepancy {worst}, target {BCH_TARGET}"),
            json!({"per_dim": per_dim}),
        ))
    })
}

/// Per pair: the discrepancy traces of both limit formulas.
#[derive(Debug, Clone, Serialize)]
struct LimitOutcome {
    add: Vec<i64>,
    bracket: Vec<i64>,
}

fn nondecreasing(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

/// `(x^(p^t) y^(p^t))^(p^-t)` and the commutator analogue.
///
/// Besides the literal monotonicity, the details record whether every trace
/// stays above `min(M, 2 + t)`, the bound the error terms guarantee.
pub fn limit_formulas(seed: u64) -> CriterionReport {
    timed(8, "limit formulas", None, || {
        let precision = 12i64;
        let t_max = precision as u32;
        let target = precision - 2;
        let c = ctx(3);
        let mut not_monotone = Vec::new();
        let mut short = Vec::new();
        let mut below_bound = 0;
        let mut commuting_fail = Vec::new();
        for dim in [2usize, 3] {
            let pairs = random_pairs(seed, 7, dim, 100, precision);
            let results: Vec<LimitOutcome> = pairs
                .par_iter()
                .map(|(x, y)| {
                    let (_, add) = limit_add(x, y, t_max)?;
                    let (_, br) = limit_bracket(x, y, t_max)?;
                    Ok(LimitOutcome {
                        add: add.discrepancy_valuations,
                        bracket: br.discrepancy_valuations,
                    })
                })
                .collect::<Result<_>>()?;
            for (i, r) in results.iter().enumerate() {
                for (kind, trace) in [("add", &r.add), ("bracket", &r.bracket)] {
                    if !nondecreasing(trace) {
                        not_monotone
                            .push(json!({"dim": dim, "pair": i, "formula": kind, "trace": trace}));
                    }
                    if *trace.last().expect("nonempty") < target {
                        short.push(json!({"dim": dim, "pair": i, "formula": kind, "trace": trace}));
                    }
                    if trace
                        .iter()
                        .enumerate()
                        .any(|(t, &d)| d < precision.min(2 + t as i64))
                    {
                        below_bound += 1;
                    }
                }
            }
            // commuting pairs: powers of one element
            let mut rng = rng_for(seed ^ dim as u64, 8);
            for i in 0..10 {
                let x = random_group_element(c, dim, precision, &mut rng);
                let mut y = x.clone();
                for _ in 0..rng.gen_range(0..4) {
                    y = group_mul(&y, &x)?;
                }
                let (_, add) = limit_add(&x, &y, 3)?;
                let (_, br) = limit_bracket(&x, &y, 3)?;
                if add.reached_floor_at != Some(0) || br.reached_floor_at != Some(0) {
                    commuting_fail.push(format!("dim {dim} commuting pair {i}"));
                }
            }
        }
        let passed = not_monotone.is_empty() && short.is_empty() && commuting_fail.is_empty();
        Ok((
            passed,
            format!(
                "200 pairs to t = {t_max}: {} traces not monotone, {} below {target} at t = {t_max}, \
                 {below_bound} below min(M, 2 + t), {} commuting pairs inexact",
                not_monotone.len(),
                short.len(),
                commuting_fail.len()
            ),
            json!({"not_monotone": not_monotone, "short": short, "below_bound": below_bound,
                "commuting_failures": commuting_fail}),
        ))
    })
}

/// Powerful lattices and injectivity of the p-th power map.
pub fn powerful_uniformity(seed: u64) -> CriterionReport {
    timed(9, "powerful and uniform", None, || {
        let c = ctx(3);
        let prec = 12;
        let checks = [
            ("pM_2(Z_3)", matrix_lattice_basis(c, 2, 1, prec), true),
            ("pM_3(Z_3)", matrix_lattice_basis(c, 3, 1, prec), true),
            ("Heisenberg", heisenberg_basis(c, prec), true),
            ("M_2(Z_3)", matrix_lattice_basis(c, 2, 0, prec), false),
        ];
        let mut wrong = Vec::new();
        let mut lattices = Vec::new();
        for (name, basis, expected) in &checks {
            let r = powerful_check(c, basis)?;
            if r.powerful != *expected {
                wrong.push(name.to_string());
            }
            lattices.push(json!({"lattice": name, "powerful": r.powerful, "min_valuation": r.min_coordinate_valuation}));
        }
        let mut rng = rng_for(seed, 9);
        let mut audits = Vec::new();
        for dim in [2usize, 3] {
            for level in 1..=3u32 {
                let a = uniformity_audit(c, dim, level, 50, &mut rng)?;
                if !a.injective || !a.images_match_representatives || a.representatives != 50 {
                    wrong.push(format!("dim {dim} level {level}"));
                }
                audits.push(serde_json::to_value(&a).expect("serializable"));
            }
        }
        Ok((
            wrong.is_empty(),
            format!(
                "4 lattices and 6 level audits of 50 cosets, {} wrong",
                wrong.len()
            ),
            json!({"lattices": lattices, "audits": audits, "wrong": wrong}),
        ))
    })
}

/// Coassociativity and integrality of the coordinate group law.
pub fn hopf_structure(_seed: u64) -> CriterionReport {
    timed(10, "Hopf structure", None, || {
        let mut cases: Vec<(String, StructureConstants, u32)> = (1..=3)
            .map(|d| {
                (
                    format!("abelian d={d}"),
                    StructureConstants::abelian(ctx(3), d),
                    6,
                )
            })
            .collect();
        cases.push((
            "Heisenberg p=3".into(),
            StructureConstants::heisenberg(ctx(3)),
            6,
        ));
        cases.push((
            "p sl_2 p=5".into(),
            StructureConstants::scaled_sl2(ctx(5)),
            6,
        ));
        let mut wrong = Vec::new();
        let mut rows = Vec::new();
        for (name, sc, degree) in &cases {
            let phi = phi_coordinates(sc, *degree)?;
            let coassoc = coassociativity_check(&phi)?;
            let integral = integrality_report(&phi);
            if coassoc.iter().any(Option::is_some) || !integral.integral {
                wrong.push(name.clone());
            }
            rows.push(
                json!({"lattice": name, "coassociativity": coassoc, "integrality": integral}),
            );
        }
        // closed form of the comultiplication of h^dual
        let c = ctx(3);
        let phi = phi_coordinates(&StructureConstants::heisenberg(c), 6)?;
        let half_p = BigRational::new(BigInt::from(3), BigInt::from(2));
        let mut want = std::collections::BTreeMap::new();
        want.insert(vec![0, 0, 1, 0, 0, 0], BigRational::from_integer(1.into()));
        want.insert(vec![0, 0, 0, 0, 0, 1], BigRational::from_integer(1.into()));
        want.insert(vec![1, 0, 0, 0, 1, 0], half_p.clone());
        want.insert(vec![0, 1, 0, 1, 0, 0], -half_p);
        let closed_form = phi.coordinate(2).terms() == &want;
        if !closed_form {
            wrong.push("Heisenberg closed form".into());
        }
        Ok((
            wrong.is_empty(),
            format!(
                "{} lattices exact and integral, closed form {}",
                cases.len() - wrong.len().min(cases.len()),
                closed_form
            ),
            json!({"cases": rows, "wrong": wrong}),
        ))
    })
}

/// Tails of the pairing between boundary families at levels `n`.
pub fn duality_tails(_seed: u64) -> CriterionReport {
    timed(11, "duality convergence", None, || {
        let mut wrong = Vec::new();
        let mut rows = Vec::new();
        for p in [3u64, 5] {
            let c = ctx(p);
            for n in 0..2u32 {
                let k_max = 32 * (p as usize - 1) * (p as usize).pow(n);
                let f = boundary_function_family(c, n, k_max, 30);
                let l = overconvergent_distribution_family(c, n, k_max, 30);
                let r = duality_convergence(&l, &f, n)?;
                let exact = exact_tail_valuations(
                    &c,
                    &f.coeffs()
                        .iter()
                        .map(PadicScalar::to_rational)
                        .collect::<Vec<_>>(),
                    &l.coeffs()
                        .iter()
                        .map(PadicScalar::to_rational)
                        .collect::<Vec<_>>(),
                );
                let oracle_ok = r
                    .tail_valuations
                    .iter()
                    .zip(&exact)
                    .all(|(t, e)| t.bound() == *e);
                let ok = r.f_in_fn == Some(true)
                    && r.lambda_in_gn == Some(true)
                    && r.monotone_divergence
                    && r.fitted_constant.is_some()
                    && oracle_ok;
                if !ok {
                    wrong.push(format!("p={p} n={n}"));
                }
                rows.push(json!({
                    "p": p, "n": n, "K": k_max,
                    "slope_f": r.slope_f.to_string(), "slope_lambda": r.slope_lambda.to_string(),
                    "fitted_constant": r.fitted_constant.map(|c| c.to_string()),
                    "block_minima": r.block_minima,
                }));
            }
        }
        let constants: Vec<String> = rows
            .iter()
            .map(|r| {
                format!(
                    "p={} n={} C={}",
                    r["p"],
                    r["n"],
                    r["fitted_constant"].as_str().unwrap_or("-")
                )
            })
            .collect();
        Ok((
            wrong.is_empty(),
            format!("{}; {} cases off", constants.join(", "), wrong.len()),
            json!({"cases": rows, "wrong": wrong}),
        ))
    })
}

pub type Criterion = fn(u64) -> CriterionReport;

pub const CRITERIA: [Criterion; 11] = [
    binomial_audit,
    mahler_reconstruction,
    character_decay,
    duality_pairing,
    convolution_law,
    dmn_tower,
    bch_group_law,
    limit_formulas,
    powerful_uniformity,
    hopf_structure,
    duality_tails,
];

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| c(seed)).collect()
}

/// Smallest BCH degree whose discrepancy reaches `target` on every one of
/// `count` random pairs, searched up to `max_degree`.
pub fn bch_degree_needed(
    seed: u64,
    dim: usize,
    count: usize,
    precision: i64,
    target: i64,
    max_degree: usize,
) -> Result<Option<usize>> {
    let pairs = random_pairs(seed, 7, dim, count, precision);
    for degree in 2..=max_degree {
        let series = BchSeries::new(degree)?;
        let min = pairs
            .par_iter()
            .map(|(x, y)| group_law_check(&series, x, y))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .expect("nonempty");
        if min >= target {
            return Ok(Some(degree));
        }
    }
    Ok(None)
}
