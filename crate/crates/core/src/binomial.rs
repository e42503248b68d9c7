//! Valuations of binomial coefficients `binom(a, k)` for `a` ranging over
//! residue classes `a = b + p^(n+1) c`, `c` a unit.
//!
//! [`lemma61_formula`] evaluates the closed form `-v_p(floor(k/p^(n+1))!)`
//! for the extremal valuation; [`lemma61_oracle`] finds the extremum by
//! exhaustive search over residues and is the ground truth the formula is
//! audited against. [`audit_sweep`] runs the search for a whole range of
//! `k` at once using prefix sums of `v_p(a - i)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PadicError, Result};
use crate::padic::{PrimeContext, RationalValuation};

/// An extremizing `a = b + p^(n+1) c` found by the residue search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueWitness {
    pub b: u64,
    pub c_residue: u64,
    pub k: u64,
    pub attained_valuation: RationalValuation,
}

impl ResidueWitness {
    /// The integer `a = b + p^(n+1) c`.
    pub fn a(&self, ctx: &PrimeContext, n: u32) -> i128 {
        self.b as i128 + (ctx.p() as i128).pow(n + 1) * self.c_residue as i128
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleResult {
    pub min_valuation: i64,
    pub witness: ResidueWitness,
}

/// `#{0 <= i < k : i = b (mod p^j)}`.
pub fn alpha_count(b: u64, k: u64, j: u32, ctx: &PrimeContext) -> u64 {
    let m = (ctx.p() as u64).pow(j);
    let r = b % m;
    if r >= k {
        0
    } else {
        (k - 1 - r) / m + 1
    }
}

/// `v_p(a (a-1) ... (a-k+1))`, exactly. Fails when a factor vanishes.
pub fn falling_factorial_valuation(a: i128, k: u64, ctx: &PrimeContext) -> Result<u64> {
    if k == 0 {
        return Err(PadicError::InvalidInput(
            "falling factorial needs k >= 1".into(),
        ));
    }
    let mut total = 0u64;
    for i in 0..k as i128 {
        match ctx.valuation_i128(a - i) {
            Some(v) => total += v as u64,
            None => {
                return Err(PadicError::InfiniteValuation(format!(
                    "factor a - {i} vanishes for a = {a}"
                )))
            }
        }
    }
    Ok(total)
}

/// `v_p(binom(a, k))`; `None` when the coefficient is zero (`0 <= a < k`).
pub fn binomial_valuation(a: i128, k: u64, ctx: &PrimeContext) -> Option<i64> {
    if k == 0 {
        return Some(0);
    }
    falling_factorial_valuation(a, k, ctx)
        .ok()
        .map(|f| f as i64 - ctx.legendre_valuation(k) as i64)
}

/// The closed form for `min_b v_p(binom(a, k))`: `-v_p(floor(k/p^(n+1))!)`.
pub fn lemma61_formula(n: u32, k: u64, ctx: &PrimeContext) -> RationalValuation {
    let q = k / (ctx.p() as u64).pow(n + 1);
    RationalValuation::integer(-(ctx.legendre_valuation(q) as i64))
}

fn unit_residues(ctx: &PrimeContext, depth: u32) -> impl Iterator<Item = u64> {
    let p = ctx.p() as u64;
    (1..p.pow(depth)).filter(move |c| c % p != 0)
}

fn check_depth(n: u32, depth: u32) -> Result<()> {
    if depth < n + 2 {
        return Err(PadicError::InvalidInput(format!(
            "search depth {depth} below n + 2 = {}",
            n + 2
        )));
    }
    Ok(())
}

/// Default residue depth `n + 3`.
pub fn default_depth(n: u32) -> u32 {
    n + 3
}

/// Exhaustive minimum of `v_p(binom(a, k))` over `b in [0, p^(n+1))` and
/// unit residues `c` modulo `p^search_depth`. Ties go to the smallest
/// `(b, c)`.
pub fn lemma61_oracle(
    n: u32,
    k: u64,
    ctx: &PrimeContext,
    search_depth: u32,
) -> Result<OracleResult> {
    check_depth(n, search_depth)?;
    let p = ctx.p() as i128;
    let block = p.pow(n + 1);
    let mut best: Option<(i64, u64, u64)> = None;
    for b in 0..block as u64 {
        for c in unit_residues(ctx, search_depth) {
            let a = b as i128 + block * c as i128;
            if let Some(v) = binomial_valuation(a, k, ctx) {
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, b, c));
                }
            }
        }
    }
    let (v, b, c) = best.ok_or_else(|| {
        PadicError::PrecisionExhausted(format!(
            "every searched a is below k = {k}; raise the depth"
        ))
    })?;
    Ok(OracleResult {
        min_valuation: v,
        witness: ResidueWitness {
            b,
            c_residue: c,
            k,
            attained_valuation: RationalValuation::integer(v),
        },
    })
}

/// One line of the audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRow {
    pub p: u32,
    pub n: u32,
    pub k: u64,
    pub formula_valuation: RationalValuation,
    pub oracle_valuation: i64,
    pub witness_b: u64,
    pub witness_c: u64,
    pub agrees: bool,
}

/// Runs the residue search for every `k` in `0..=kmax` in one pass per
/// `a`, accumulating `v_p(a - i)` as a prefix sum.
pub fn audit_sweep(
    ctx: &PrimeContext,
    n: u32,
    kmax: u64,
    search_depth: u32,
) -> Result<Vec<AuditRow>> {
    check_depth(n, search_depth)?;
    let p = ctx.p() as i128;
    let block = p.pow(n + 1);
    let len = kmax as usize + 1;
    let legendre: Vec<i64> = (0..=kmax)
        .map(|k| ctx.legendre_valuation(k) as i64)
        .collect();
    let residues: Vec<u64> = unit_residues(ctx, search_depth).collect();

    // per b: best (valuation, c) for each k
    let per_b: Vec<Vec<Option<(i64, u64)>>> = (0..block as u64)
        .into_par_iter()
        .map(|b| {
            let mut best: Vec<Option<(i64, u64)>> = vec![None; len];
            for &c in &residues {
                let a = b as i128 + block * c as i128;
                let mut falling = 0i64;
                for k in 0..len {
                    if k > 0 {
                        match ctx.valuation_i128(a - (k as i128 - 1)) {
                            Some(v) => falling += v as i64,
                            None => break,
                        }
                    }
                    let v = falling - legendre[k];
                    if best[k].is_none_or(|(bv, _)| v < bv) {
                        best[k] = Some((v, c));
                    }
                }
            }
            best
        })
        .collect();

    let mut rows = Vec::with_capacity(len);
    for k in 0..len {
        let mut best: Option<(i64, u64, u64)> = None;
        for (b, row) in per_b.iter().enumerate() {
            if let Some((v, c)) = row[k] {
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, b as u64, c));
                }
            }
        }
        let (v, b, c) = best.ok_or_else(|| {
            PadicError::PrecisionExhausted(format!("no admissible a for k = {k}; raise the depth"))
        })?;
        let formula = lemma61_formula(n, k as u64, ctx);
        rows.push(AuditRow {
            p: ctx.p(),
            n,
            k: k as u64,
            formula_valuation: formula,
            oracle_valuation: v,
            witness_b: b,
            witness_c: c,
            agrees: formula == RationalValuation::integer(v),
        });
    }
    Ok(rows)
}

pub const AUDIT_CSV_HEADER: &str =
    "p,n,k,formula_valuation,oracle_valuation,witness_b,witness_c,agrees";

pub fn audit_csv(rows: &[AuditRow]) -> String {
    let mut out = String::from(AUDIT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.p,
            r.n,
            r.k,
            r.formula_valuation,
            r.oracle_valuation,
            r.witness_b,
            r.witness_c,
            r.agrees
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let c = ctx(3);
        assert_eq!(alpha_count(0, 0, 1, &c), 0);
        assert_eq!(alpha_count(0, 10, 1, &c), 4);
        assert_eq!(alpha_count(2, 10, 2, &c), 1);
    }

    #[test]
    fn alpha_matches_enumeration_and_bounds() {
        for p in [2u64, 3, 5] {
            let c = ctx(p);
            for j in 1..4u32 {
                let m = p.pow(j);
                for b in 0..2 * m {
                    for k in 0..60u64 {
                        let direct = (0..k).filter(|i| i % m == b % m).count() as u64;
                        let a = alpha_count(b, k, j, &c);
                        assert_eq!(a, direct);
                        assert!(a == k / m || a == k / m + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn falling_factorial_examples() {
        let c = ctx(3);
        assert_eq!(falling_factorial_valuation(9, 4, &c).unwrap(), 3);
        assert_eq!(falling_factorial_valuation(1, 1, &c).unwrap(), 0);
        for k in 1..40u64 {
            assert_eq!(
                falling_factorial_valuation(k as i128, k, &c).unwrap(),
                c.legendre_valuation(k)
            );
        }
        assert!(matches!(
            falling_factorial_valuation(2, 5, &c),
            Err(PadicError::InfiniteValuation(_))
        ));
    }

    /// Summing `alpha_count` over `j = 1..J` counts each `i` once per power
    /// of `p` dividing `a - i`, provided no `v_p(a - i)` exceeds `J`.
    #[test]
    fn falling_factorial_equals_alpha_sum() {
        let c = ctx(3);
        let big_j = 6u32;
        let modulus = 3i128.pow(big_j);
        for a in 50..400i128 {
            for k in 1..30u64 {
                let max_v = (0..k as i128).filter_map(|i| c.valuation_i128(a - i)).max();
                if (0..k as i128).any(|i| a == i) || max_v.unwrap_or(0) > big_j {
                    continue;
                }
                let b = (a % modulus) as u64;
                let alpha: u64 = (1..=big_j).map(|j| alpha_count(b, k, j, &c)).sum();
                assert_eq!(
                    falling_factorial_valuation(a, k, &c).unwrap(),
                    alpha,
                    "a={a} k={k}"
                );
            }
        }
    }

    #[test]
    fn formula_examples() {
        let c = ctx(3);
        assert_eq!(lemma61_formula(0, 5, &c), RationalValuation::zero());
        assert_eq!(lemma61_formula(0, 0, &c), RationalValuation::zero());
        assert_eq!(lemma61_formula(1, 8, &c), RationalValuation::zero());
        // floor(60/3) = 20, v_3(20!) = 8
        assert_eq!(lemma61_formula(0, 60, &c), RationalValuation::integer(-8));
    }

    #[test]
    fn oracle_examples() {
        let c = ctx(3);
        let r = lemma61_oracle(0, 5, &c, 3).unwrap();
        assert_eq!(r.min_valuation, 0);
        assert_eq!(r.witness.a(&c, 0), 5);
        assert_eq!(lemma61_oracle(0, 7, &c, 3).unwrap().min_valuation, 0);
        assert_eq!(lemma61_oracle(1, 3, &c, 4).unwrap().min_valuation, 0);
        assert!(lemma61_oracle(1, 3, &c, 2).is_err());
    }

    #[test]
    fn sweep_agrees_with_pointwise_oracle() {
        for (p, n) in [(3u64, 0u32), (3, 1), (5, 0)] {
            let c = ctx(p);
            let depth = default_depth(n);
            let rows = audit_sweep(&c, n, 40, depth).unwrap();
            for row in rows {
                let r = lemma61_oracle(n, row.k, &c, depth).unwrap();
                assert_eq!(row.oracle_valuation, r.min_valuation);
                assert_eq!(
                    (row.witness_b, row.witness_c),
                    (r.witness.b, r.witness.c_residue)
                );
                assert!(row.oracle_valuation >= 0);
            }
        }
    }

    #[test]
    fn empty_sweep_csv_has_header() {
        assert_eq!(audit_csv(&[]), format!("{AUDIT_CSV_HEADER}\n"));
    }
}
