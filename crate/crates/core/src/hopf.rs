//! The group law of a powerful lattice in coordinates: `Phi(sum x_j d_j,
//! sum y_j d_j) = sum_j Phi_j(x, y) d_j`, and the comultiplication
//! `d_j^dual -> Phi_j(d^dual (x) 1, 1 (x) d^dual)` on the symmetric algebra of
//! the dual lattice, all truncated at total degree `D`.
//!
//! Coefficients are exact rationals; p-adic information (integrality,
//! discrepancy valuations) is read off at the end.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{PadicError, Result};
use crate::groups::bch::{BchSeries, LieAlgebra};
use crate::groups::powerful::structure_constants;
use crate::padic::json::parse_rational;
use crate::padic::{PadicMatrix, PrimeContext};

/// A polynomial over `Q` in `nvars` variables, truncated after total degree `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymTruncation {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl SymTruncation {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, degree: u32, c: BigRational) -> Self {
        let mut s = Self::zero(nvars, degree);
        s.insert(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, degree: u32) -> Self {
        Self::constant(nvars, degree, BigRational::one())
    }

    pub fn var(nvars: usize, degree: u32, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut s = Self::zero(nvars, degree);
        s.insert(e, BigRational::one());
        s
    }

    pub fn monomial(nvars: usize, degree: u32, exponents: Vec<u32>, c: BigRational) -> Self {
        let mut s = Self::zero(nvars, degree);
        s.insert(exponents, c);
        s
    }

    fn insert(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() || total(&e) > self.degree {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, c) in &self.terms {
            out.insert(e.clone(), c * q);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.degree.min(other.degree));
        let other_terms: Vec<(&Vec<u32>, &BigRational, u32)> =
            other.terms.iter().map(|(e, c)| (e, c, total(e))).collect();
        for (ea, ca) in &self.terms {
            let da = total(ea);
            for &(eb, cb, db) in &other_terms {
                if da + db > out.degree {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }

    /// Substitutes `subs[i]` for variable `i`. The substitutes must have no
    /// constant term, so that truncation commutes with substitution.
    pub fn substitute(&self, subs: &[SymTruncation]) -> Result<SymTruncation> {
        if subs.len() != self.nvars {
            return Err(PadicError::DimensionMismatch(subs.len(), self.nvars));
        }
        let first = subs
            .first()
            .ok_or_else(|| PadicError::InvalidInput("nothing to substitute".into()))?;
        let (nvars, degree) = (first.nvars, first.degree.min(self.degree));
        for s in subs {
            if s.nvars != nvars {
                return Err(PadicError::DimensionMismatch(s.nvars, nvars));
            }
            if !s.coeff(&vec![0; nvars]).is_zero() {
                return Err(PadicError::InvalidInput(
                    "substitutes need zero constant term".into(),
                ));
            }
        }
        // powers[i][k] = subs[i]^k
        let mut powers: Vec<Vec<SymTruncation>> = Vec::with_capacity(self.nvars);
        for s in subs {
            let mut row = vec![SymTruncation::one(nvars, degree)];
            for k in 1..=degree as usize {
                let next = row[k - 1].mul(s);
                row.push(next);
            }
            powers.push(row);
        }
        // monomials sorted lexicographically share prefixes; memoize products
        // of the leading variables
        let mut out = SymTruncation::zero(nvars, degree);
        let mut prefix_cache: BTreeMap<Vec<u32>, SymTruncation> = BTreeMap::new();
        for (e, c) in &self.terms {
            if total(e) > degree {
                continue;
            }
            let mut acc = SymTruncation::one(nvars, degree);
            let mut start = 0;
            for cut in (1..=e.len()).rev() {
                if let Some(hit) = prefix_cache.get(&e[..cut]) {
                    acc = hit.clone();
                    start = cut;
                    break;
                }
            }
            for i in start..e.len() {
                if e[i] > 0 {
                    acc = acc.mul(&powers[i][e[i] as usize]);
                }
                prefix_cache.insert(e[..=i].to_vec(), acc.clone());
            }
            out = out.add(&acc.scale(c));
        }
        Ok(out)
    }

    pub fn eval(&self, values: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in values.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Minimal p-adic valuation of a coefficient; `None` for the zero polynomial.
    pub fn min_valuation(&self, ctx: &PrimeContext) -> Option<i64> {
        self.terms
            .values()
            .filter_map(|c| rational_valuation(ctx, c))
            .min()
    }

    /// Renames variable `i` to `map[i]` in a polynomial ring with `nvars` variables.
    pub fn relabel(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars, self.degree);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            out.insert(f, c.clone());
        }
        out
    }
}

pub fn rational_valuation(ctx: &PrimeContext, q: &BigRational) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let (vn, _) = ctx.split_big(&q.numer().abs())?;
    let (vd, _) = ctx.split_big(q.denom())?;
    Some(vn as i64 - vd as i64)
}

/// Bracket `[d_i, d_j] = sum_k c[i][j][k] d_k` of a lattice with basis `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    ctx: PrimeContext,
    c: Vec<Vec<Vec<BigRational>>>,
}

impl StructureConstants {
    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(ctx: PrimeContext, c: Vec<Vec<Vec<BigRational>>>) -> Result<Self> {
        let d = c.len();
        if c.iter()
            .any(|row| row.len() != d || row.iter().any(|v| v.len() != d))
        {
            return Err(PadicError::InvalidInput(
                "structure constants must be d x d x d".into(),
            ));
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if c[i][j][k] != -c[j][i][k].clone() {
                        return Err(PadicError::Invariant(format!(
                            "bracket not antisymmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        let s = Self { ctx, c };
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    // [d_i,[d_j,d_k]] + [d_j,[d_k,d_i]] + [d_k,[d_i,d_j]]
                    let mut sum = vec![BigRational::zero(); d];
                    for (a, b, cc) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for m in 0..d {
                            let inner = &s.c[b][cc][m];
                            if inner.is_zero() {
                                continue;
                            }
                            for (n, slot) in sum.iter_mut().enumerate() {
                                *slot += inner * &s.c[a][m][n];
                            }
                        }
                    }
                    if sum.iter().any(|x| !x.is_zero()) {
                        return Err(PadicError::Invariant(format!(
                            "Jacobi fails at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.c[i][j][k]
    }

    pub fn abelian(ctx: PrimeContext, d: usize) -> Self {
        Self {
            ctx,
            c: vec![vec![vec![BigRational::zero(); d]; d]; d],
        }
    }

    /// Basis `e, f, h` with `[e, f] = p h`, the other brackets zero.
    pub fn heisenberg(ctx: PrimeContext) -> Self {
        let mut c = vec![vec![vec![BigRational::zero(); 3]; 3]; 3];
        let p = BigRational::from_integer(ctx.p_big());
        c[0][1][2] = p.clone();
        c[1][0][2] = -p;
        Self::new(ctx, c).expect("valid")
    }

    /// Lattice with basis `p e, p f, p h` in `sl_2`.
    pub fn scaled_sl2(ctx: PrimeContext) -> Self {
        let mut c = vec![vec![vec![BigRational::zero(); 3]; 3]; 3];
        let p = BigRational::from_integer(ctx.p_big());
        let two_p = &p * BigRational::from_integer(BigInt::from(2));
        // [pe, pf] = p (ph), [ph, pe] = 2p (pe), [ph, pf] = -2p (pf)
        c[0][1][2] = p.clone();
        c[1][0][2] = -p;
        c[2][0][0] = two_p.clone();
        c[0][2][0] = -two_p.clone();
        c[2][1][1] = -two_p.clone();
        c[1][2][1] = two_p;
        Self::new(ctx, c).expect("valid")
    }

    pub fn from_matrix_basis(ctx: PrimeContext, basis: &[PadicMatrix]) -> Result<Self> {
        Self::new(ctx, structure_constants(ctx, basis)?)
    }

    /// Constants of `p^n L` in the basis `p^n d_j`: every bracket gains `p^n`.
    pub fn scaled(&self, n: u32) -> Self {
        let f = BigRational::from_integer(self.ctx.pow(n));
        Self {
            ctx: self.ctx,
            c: self
                .c
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| v.iter().map(|x| x * &f).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// Constants in the basis `d'_i = sum_j g[j][i] d_j` for invertible `g`.
    pub fn change_basis(&self, g: &[Vec<BigRational>]) -> Result<Self> {
        let d = self.dim();
        let g_inv =
            invert(g).ok_or_else(|| PadicError::InvalidInput("basis change is singular".into()))?;
        let mut c = vec![vec![vec![BigRational::zero(); d]; d]; d];
        for a in 0..d {
            for b in 0..d {
                // [d'_a, d'_b] in old coordinates
                let mut old = vec![BigRational::zero(); d];
                for i in 0..d {
                    if g[i][a].is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        if g[j][b].is_zero() {
                            continue;
                        }
                        let f = &g[i][a] * &g[j][b];
                        for (k, slot) in old.iter_mut().enumerate() {
                            *slot += &f * &self.c[i][j][k];
                        }
                    }
                }
                for (k, slot) in c[a][b].iter_mut().enumerate() {
                    *slot = (0..d).map(|m| &g_inv[k][m] * &old[m]).sum();
                }
            }
        }
        Self::new(self.ctx, c)
    }
}

fn invert(g: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let d = g.len();
    let mut a: Vec<Vec<BigRational>> = g.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| BigRational::from_integer(BigInt::from((i == j) as i32)))
                .collect()
        })
        .collect();
    for col in 0..d {
        let pr = (col..d).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pr);
        inv.swap(col, pr);
        let piv = a[col][col].recip();
        for j in 0..d {
            a[col][j] *= &piv;
            inv[col][j] *= &piv;
        }
        for r in 0..d {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..d {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

/// The lattice `Q^d (x) Q[vars]` with the bracket from structure constants,
/// polynomial coefficients truncated at the degree.
struct PolyLie<'a> {
    sc: &'a StructureConstants,
}

impl LieAlgebra for PolyLie<'_> {
    type Elem = Vec<SymTruncation>;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
    }

    fn scale(&self, q: &BigRational, a: &Self::Elem) -> Result<Self::Elem> {
        Ok(a.iter().map(|x| x.scale(q)).collect())
    }

    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        let d = self.sc.dim();
        let mut out: Vec<SymTruncation> = a
            .iter()
            .map(|x| SymTruncation::zero(x.nvars, x.degree))
            .collect();
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if i == j || b[j].is_zero() {
                    continue;
                }
                let coeffs = &self.sc.c[i][j];
                if coeffs.iter().all(Zero::is_zero) {
                    continue;
                }
                let prod = a[i].mul(&b[j]);
                for (k, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].add(&prod.scale(c));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `Phi_1, ..., Phi_d` in the variables `x_1..x_d, y_1..y_d` (indices
/// `0..d` and `d..2d`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiCoordinates {
    ctx: PrimeContext,
    degree: u32,
    phi: Vec<SymTruncation>,
}

impl PhiCoordinates {
    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn coordinate(&self, j: usize) -> &SymTruncation {
        &self.phi[j]
    }

    pub fn coordinates(&self) -> &[SymTruncation] {
        &self.phi
    }

    /// `Phi(x, y)` at rational points.
    pub fn eval(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let point: Vec<BigRational> = x.iter().chain(y).cloned().collect();
        self.phi.iter().map(|f| f.eval(&point)).collect()
    }
}

pub fn phi_coordinates(sc: &StructureConstants, degree: u32) -> Result<PhiCoordinates> {
    let series = BchSeries::new(degree as usize)?;
    phi_coordinates_with(sc, &series)
}

pub fn phi_coordinates_with(sc: &StructureConstants, series: &BchSeries) -> Result<PhiCoordinates> {
    let d = sc.dim();
    let degree = series.degree() as u32;
    let x: Vec<SymTruncation> = (0..d)
        .map(|i| SymTruncation::var(2 * d, degree, i))
        .collect();
    let y: Vec<SymTruncation> = (0..d)
        .map(|i| SymTruncation::var(2 * d, degree, d + i))
        .collect();
    let phi = series.evaluate(&PolyLie { sc }, &x, &y)?;
    Ok(PhiCoordinates {
        ctx: sc.ctx(),
        degree,
        phi,
    })
}

/// `Delta(f)` for `f` in the `d` dual generators: the algebra map sending
/// generator `j` to `Phi_j` in the `2d` generators of the tensor square.
pub fn comult(f: &SymTruncation, phi: &PhiCoordinates) -> Result<SymTruncation> {
    if f.nvars() != phi.dim() {
        return Err(PadicError::DimensionMismatch(f.nvars(), phi.dim()));
    }
    let constant = f.coeff(&vec![0; f.nvars()]);
    let rest = f.sub(&SymTruncation::constant(
        f.nvars(),
        f.degree(),
        constant.clone(),
    ));
    let out = if rest.is_zero() {
        SymTruncation::zero(2 * phi.dim(), phi.degree().min(f.degree()))
    } else {
        rest.substitute(phi.coordinates())?
    };
    Ok(out.add(&SymTruncation::constant(
        out.nvars(),
        out.degree(),
        constant,
    )))
}

/// Per generator `j`, the minimal valuation of a coefficient of
/// `(Delta (x) id) Delta(d_j) - (id (x) Delta) Delta(d_j)` modulo degree `D+1`;
/// `None` when the difference vanishes exactly.
pub fn coassociativity_check(phi: &PhiCoordinates) -> Result<Vec<Option<i64>>> {
    let d = phi.dim();
    let xy: Vec<usize> = (0..2 * d).collect();
    let yz: Vec<usize> = (d..3 * d).collect();
    // Phi(x, y) and Phi(y, z) inside the ring on x, y, z
    let phi_xy: Vec<SymTruncation> = phi.phi.iter().map(|f| f.relabel(3 * d, &xy)).collect();
    let phi_yz: Vec<SymTruncation> = phi.phi.iter().map(|f| f.relabel(3 * d, &yz)).collect();
    let var = |i: usize| SymTruncation::var(3 * d, phi.degree, i);
    let left_args: Vec<SymTruncation> = phi_xy
        .iter()
        .cloned()
        .chain((2 * d..3 * d).map(var))
        .collect();
    let right_args: Vec<SymTruncation> = (0..d).map(var).chain(phi_yz.iter().cloned()).collect();
    phi.phi
        .iter()
        .map(|f| {
            let left = f.substitute(&left_args)?;
            let right = f.substitute(&right_args)?;
            Ok(left.sub(&right).min_valuation(&phi.ctx))
        })
        .collect()
}

/// `Phi_j(x, 0) = x_j` and `Phi_j(0, y) = y_j`.
pub fn counit_check(phi: &PhiCoordinates) -> bool {
    let d = phi.dim();
    phi.phi.iter().enumerate().all(|(j, f)| {
        let only = |range: std::ops::Range<usize>, var: usize| {
            let restricted: BTreeMap<&Vec<u32>, &BigRational> = f
                .terms()
                .iter()
                .filter(|(e, _)| {
                    e.iter()
                        .enumerate()
                        .all(|(i, &k)| k == 0 || range.contains(&i))
                })
                .collect();
            let mut want = vec![0; 2 * d];
            want[var] = 1;
            restricted.len() == 1 && restricted.get(&want).is_some_and(|c| c.is_one())
        };
        only(0..d, j) && only(d..2 * d, d + j)
    })
}

/// The antipode is `x -> -x` in these coordinates; checks
/// `Phi(x, -x) = 0 = Phi(-x, x)` modulo degree `D+1`.
pub fn antipode_check(phi: &PhiCoordinates) -> Result<bool> {
    let d = phi.dim();
    let minus_one = -BigRational::one();
    let var = |i: usize| SymTruncation::var(d, phi.degree, i);
    let plus: Vec<SymTruncation> = (0..d).map(var).collect();
    let minus: Vec<SymTruncation> = plus.iter().map(|x| x.scale(&minus_one)).collect();
    let args_a: Vec<SymTruncation> = plus.iter().chain(&minus).cloned().collect();
    let args_b: Vec<SymTruncation> = minus.iter().chain(&plus).cloned().collect();
    for f in &phi.phi {
        if !f.substitute(&args_a)?.is_zero() || !f.substitute(&args_b)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coordinates for `p^n L`: `p^-n Phi(p^n x, p^n y)`, so the degree-`k`
/// part gains `p^(n(k-1))`.
pub fn scale_lattice(phi: &PhiCoordinates, n: u32) -> PhiCoordinates {
    let p = BigRational::from_integer(phi.ctx.p_big());
    let scaled = phi
        .phi
        .iter()
        .map(|f| {
            let mut out = SymTruncation::zero(f.nvars(), f.degree());
            for (e, c) in f.terms() {
                let k = total(e);
                let factor = num_traits::pow(p.clone(), (n * k.saturating_sub(1)) as usize);
                out.insert(e.clone(), c * factor);
            }
            out
        })
        .collect();
    PhiCoordinates {
        ctx: phi.ctx,
        degree: phi.degree,
        phi: scaled,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    /// Minimal coefficient valuation per coordinate.
    pub min_valuations: Vec<Option<i64>>,
    pub integral: bool,
}

pub fn integrality_report(phi: &PhiCoordinates) -> IntegralityReport {
    let min_valuations: Vec<Option<i64>> =
        phi.phi.iter().map(|f| f.min_valuation(&phi.ctx)).collect();
    let integral = min_valuations.iter().all(|v| v.is_none_or(|v| v >= 0));
    IntegralityReport {
        min_valuations,
        integral,
    }
}

/// `Phi_g(x, y) = g^-1 Phi(g x, g y)` where `Phi_g` is computed from the
/// constants in the new basis; checked as a polynomial identity.
pub fn basis_change_check(
    sc: &StructureConstants,
    g: &[Vec<BigRational>],
    degree: u32,
) -> Result<bool> {
    let d = sc.dim();
    let series = BchSeries::new(degree as usize)?;
    let phi = phi_coordinates_with(sc, &series)?;
    let phi_new = phi_coordinates_with(&sc.change_basis(g)?, &series)?;
    // g x and g y as linear forms in the new coordinates
    let lin = |offset: usize| -> Vec<SymTruncation> {
        (0..d)
            .map(|i| {
                let mut f = SymTruncation::zero(2 * d, degree);
                for j in 0..d {
                    let mut e = vec![0; 2 * d];
                    e[offset + j] = 1;
                    f.insert(e, g[i][j].clone());
                }
                f
            })
            .collect()
    };
    let args: Vec<SymTruncation> = lin(0).into_iter().chain(lin(d)).collect();
    let old_at_g: Vec<SymTruncation> = phi
        .phi
        .iter()
        .map(|f| f.substitute(&args))
        .collect::<Result<_>>()?;
    // g Phi_new
    for i in 0..d {
        let mut rhs = SymTruncation::zero(2 * d, degree);
        for j in 0..d {
            rhs = rhs.add(&phi_new.phi[j].scale(&g[i][j]));
        }
        if rhs != old_at_g[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{"p": 3, "constants": [[["0", "0", "0"], ...], ...]}` with
/// `constants[i][j][k] = c_ij^k` as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub p: u64,
    pub constants: Vec<Vec<Vec<String>>>,
}

impl StructureJson {
    pub fn from_constants(sc: &StructureConstants) -> Self {
        Self {
            p: sc.ctx.p() as u64,
            constants: sc
                .c
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| v.iter().map(ToString::to_string).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_constants(&self) -> Result<StructureConstants> {
        let ctx = PrimeContext::new(self.p)?;
        let c = self
            .constants
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        v.iter()
                            .map(|x| parse_rational(x))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        StructureConstants::new(ctx, c)
    }
}

/// Everything checked about the coordinate group law of `p^scale L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComultReport {
    pub dim: usize,
    pub degree: u32,
    pub scale: u32,
    /// Per generator; `None` (JSON `null`) means exact to the truncation.
    pub coassociativity: Vec<Option<i64>>,
    pub counit: bool,
    pub antipode: bool,
    pub integrality: IntegralityReport,
}

pub fn comult_report(sc: &StructureConstants, degree: u32, scale: u32) -> Result<ComultReport> {
    let phi = scale_lattice(&phi_coordinates(sc, degree)?, scale);
    Ok(ComultReport {
        dim: phi.dim(),
        degree,
        scale,
        coassociativity: coassociativity_check(&phi)?,
        counit: counit_check(&phi),
        antipode: antipode_check(&phi)?,
        integrality: integrality_report(&phi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::bch::MatrixLie;
    use crate::groups::powerful::heisenberg_basis;
    use crate::padic::PadicScalar;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn e(v: &[u32]) -> Vec<u32> {
        v.to_vec()
    }

    #[test]
    fn abelian_is_additive() {
        let ctx = PrimeContext::new(3).unwrap();
        for d in 1..=3 {
            let phi = phi_coordinates(&StructureConstants::abelian(ctx, d), 5).unwrap();
            for j in 0..d {
                let want =
                    SymTruncation::var(2 * d, 5, j).add(&SymTruncation::var(2 * d, 5, d + j));
                assert_eq!(phi.coordinate(j), &want);
            }
            assert!(coassociativity_check(&phi)
                .unwrap()
                .iter()
                .all(Option::is_none));
            assert_eq!(scale_lattice(&phi, 2), phi);
        }
    }

    #[test]
    fn heisenberg_closed_form() {
        let ctx = PrimeContext::new(3).unwrap();
        let phi = phi_coordinates(&StructureConstants::heisenberg(ctx), 6).unwrap();
        let h = phi.coordinate(2);
        assert_eq!(h.terms().len(), 4);
        assert_eq!(h.coeff(&e(&[0, 0, 1, 0, 0, 0])), q(1, 1));
        assert_eq!(h.coeff(&e(&[0, 0, 0, 0, 0, 1])), q(1, 1));
        assert_eq!(h.coeff(&e(&[1, 0, 0, 0, 1, 0])), q(3, 2));
        assert_eq!(h.coeff(&e(&[0, 1, 0, 1, 0, 0])), q(-3, 2));
        assert_eq!(phi.coordinate(0).terms().len(), 2);
        assert!(counit_check(&phi));
        assert!(antipode_check(&phi).unwrap());
        assert!(coassociativity_check(&phi)
            .unwrap()
            .iter()
            .all(Option::is_none));
        let scaled = scale_lattice(&phi, 1);
        assert_eq!(scaled.coordinate(2).coeff(&e(&[1, 0, 0, 0, 1, 0])), q(9, 2));
    }

    #[test]
    fn comultiplication_examples() {
        let ctx = PrimeContext::new(3).unwrap();
        let phi = phi_coordinates(&StructureConstants::heisenberg(ctx), 4).unwrap();
        let one = SymTruncation::one(3, 4);
        assert_eq!(comult(&one, &phi).unwrap(), SymTruncation::one(6, 4));
        let h = SymTruncation::var(3, 4, 2);
        let dh = comult(&h, &phi).unwrap();
        assert_eq!(&dh, phi.coordinate(2));
        // e f maps to Phi_e Phi_f
        let ef = SymTruncation::var(3, 4, 0).mul(&SymTruncation::var(3, 4, 1));
        assert_eq!(
            comult(&ef, &phi).unwrap(),
            phi.coordinate(0).mul(phi.coordinate(1))
        );
    }

    #[test]
    fn sl2_lattice_is_coassociative_and_integral() {
        let ctx = PrimeContext::new(5).unwrap();
        let phi = phi_coordinates(&StructureConstants::scaled_sl2(ctx), 6).unwrap();
        assert!(coassociativity_check(&phi)
            .unwrap()
            .iter()
            .all(Option::is_none));
        assert!(integrality_report(&phi).integral);
        assert!(counit_check(&phi));
        assert!(antipode_check(&phi).unwrap());
        // u_2 = [X, Y] / 2: the x_e y_f coefficient of Phi_h is p / 2
        assert_eq!(phi.coordinate(2).coeff(&e(&[1, 0, 0, 0, 1, 0])), q(5, 2));
    }

    #[test]
    fn full_sl2_is_not_integral() {
        let ctx = PrimeContext::new(3).unwrap();
        let raw = StructureConstants::scaled_sl2(ctx).scaled(0);
        let mut c = vec![vec![vec![BigRational::zero(); 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[i][j][k] = raw.constant(i, j, k) / BigRational::from_integer(3.into());
                }
            }
        }
        let sl2 = StructureConstants::new(ctx, c).unwrap();
        let phi = phi_coordinates(&sl2, 6).unwrap();
        assert!(!integrality_report(&phi).integral);
    }

    #[test]
    fn invalid_constants_rejected() {
        let ctx = PrimeContext::new(3).unwrap();
        let mut c = vec![vec![vec![BigRational::zero(); 2]; 2]; 2];
        c[0][1][0] = q(1, 1);
        assert!(StructureConstants::new(ctx, c.clone()).is_err());
        c[1][0][0] = q(-1, 1);
        assert!(StructureConstants::new(ctx, c).is_ok());
        // [e,f] = h, [f,h] = e, [h,e] = e violates Jacobi
        let mut c = vec![vec![vec![BigRational::zero(); 3]; 3]; 3];
        let mut set = |i: usize, j: usize, k: usize, v: i64| {
            c[i][j][k] = q(v, 1);
            c[j][i][k] = q(-v, 1);
        };
        set(0, 1, 2, 1);
        set(1, 2, 0, 1);
        set(2, 0, 0, 1);
        assert!(StructureConstants::new(ctx, c).is_err());
    }

    #[test]
    fn matches_matrix_bch() {
        let ctx = PrimeContext::new(3).unwrap();
        let basis = heisenberg_basis(ctx, 20);
        let sc = StructureConstants::from_matrix_basis(ctx, &basis).unwrap();
        assert_eq!(sc, StructureConstants::heisenberg(ctx));
        let phi = phi_coordinates(&sc, 4).unwrap();
        let x = [q(2, 1), q(-1, 1), q(5, 1)];
        let y = [q(1, 1), q(4, 1), q(0, 1)];
        let coords = phi.eval(&x, &y);
        let combo = |c: &[BigRational]| {
            let mut m = PadicMatrix::zero(ctx, 3, 20);
            for (b, ci) in basis.iter().zip(c) {
                m = m
                    .checked_add(
                        &b.scalar_mul(&PadicScalar::from_big_rational(ctx, ci, 30))
                            .unwrap(),
                    )
                    .unwrap();
            }
            m
        };
        let series = BchSeries::new(4).unwrap();
        let direct = series.evaluate(&MatrixLie, &combo(&x), &combo(&y)).unwrap();
        assert!(direct.eq_mod_precision(&combo(&coords)));
    }

    #[test]
    fn json_round_trip_and_report() {
        let ctx = PrimeContext::new(3).unwrap();
        let sc = StructureConstants::heisenberg(ctx);
        let json = StructureJson::from_constants(&sc);
        assert_eq!(json.constants[0][1][2], "3");
        assert_eq!(json.to_constants().unwrap(), sc);
        let r = comult_report(&sc, 4, 1).unwrap();
        assert_eq!(r.coassociativity, vec![None; 3]);
        assert!(r.counit && r.antipode && r.integrality.integral);
        let mut bad = json.clone();
        bad.constants[1][0][2] = "5".into();
        assert!(matches!(bad.to_constants(), Err(PadicError::Invariant(_))));
    }

    #[test]
    fn basis_changes() {
        let ctx = PrimeContext::new(5).unwrap();
        let sc = StructureConstants::scaled_sl2(ctx);
        let g = vec![
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(2, 1), q(0, 1), q(1, 1)],
        ];
        assert!(basis_change_check(&sc, &g, 4).unwrap());
    }
}
