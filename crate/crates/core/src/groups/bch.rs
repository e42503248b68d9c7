//! The Baker-Campbell-Hausdorff series `Phi(X, Y) = log(exp X exp Y)`
//! truncated at total degree `D`, in left-normed bracket form.
//!
//! The series is computed once in the free associative algebra on `X, Y`
//! over `Q` and projected to Lie form with the Dynkin-Specht-Wever
//! operator: a homogeneous Lie polynomial `P = sum c_w w` of degree `n`
//! equals `(1/n) sum c_w [w]`, where `[x1 x2 ... xn] = [...[[x1, x2], x3], ..., xn]`.
//! The resulting coefficients are then evaluated in any [`LieAlgebra`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{PadicError, Result};
use crate::padic::{PadicMatrix, PadicScalar};

/// A Lie algebra over `Q` (or over a ring where the needed denominators
/// make sense), as much as the BCH evaluation needs.
pub trait LieAlgebra {
    type Elem: Clone;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn scale(&self, q: &BigRational, a: &Self::Elem) -> Result<Self::Elem>;
    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
}

/// Elements of the free associative algebra `Q<X, Y>` truncated after
/// degree `D`: `coeffs[n][w]` is the coefficient of the word of length `n`
/// whose letters, read from the most significant of `n` bits, are `w`
/// (0 = X, 1 = Y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeSeries {
    coeffs: Vec<Vec<BigRational>>,
}

impl FreeSeries {
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: (0..=degree)
                .map(|n| vec![BigRational::zero(); 1 << n])
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, len: usize, word: usize) -> &BigRational {
        &self.coeffs[len][word]
    }

    pub fn letter(degree: usize, letter: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.coeffs[1][letter] = BigRational::one();
        }
        s
    }

    /// `exp` of a single letter: `sum x^n / n!`.
    fn exp_letter(degree: usize, letter: usize) -> Self {
        let mut s = Self::zero(degree);
        let mut fact = BigInt::one();
        for n in 0..=degree {
            if n > 0 {
                fact *= n;
            }
            let word = if letter == 0 { 0 } else { (1 << n) - 1 };
            s.coeffs[n][word] = BigRational::new(BigInt::one(), fact.clone());
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = self.clone();
        for row in out.coeffs.iter_mut() {
            for x in row.iter_mut() {
                *x *= q;
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree();
        let mut out = Self::zero(degree);
        for (la, row_a) in self.coeffs.iter().enumerate() {
            for (wa, a) in row_a.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (lb, row_b) in other.coeffs.iter().enumerate().take(degree - la + 1) {
                    for (wb, b) in row_b.iter().enumerate() {
                        if !b.is_zero() {
                            out.coeffs[la + lb][(wa << lb) | wb] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// `log(1 + Z)` for `Z` without constant term.
    fn log_one_plus(z: &Self) -> Self {
        let degree = z.degree();
        let mut acc = Self::zero(degree);
        let mut power = z.clone();
        for k in 1..=degree {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&power.scale(&BigRational::new(BigInt::from(sign), BigInt::from(k))));
            power = power.mul(z);
        }
        acc
    }
}

/// The free associative algebra truncated after a degree, with the
/// commutator bracket.
#[derive(Debug, Clone, Copy)]
pub struct FreeAlgebra(pub usize);

impl LieAlgebra for FreeAlgebra {
    type Elem = FreeSeries;

    fn add(&self, a: &FreeSeries, b: &FreeSeries) -> Result<FreeSeries> {
        Ok(a.add(b))
    }

    fn scale(&self, q: &BigRational, a: &FreeSeries) -> Result<FreeSeries> {
        Ok(a.scale(q))
    }

    fn bracket(&self, a: &FreeSeries, b: &FreeSeries) -> Result<FreeSeries> {
        Ok(a.mul(b).add(&b.mul(a).scale(&-BigRational::one())))
    }
}

/// The truncated BCH series in left-normed bracket coordinates.
#[derive(Debug, Clone)]
pub struct BchSeries {
    degree: usize,
    /// `lie[n][w]`: coefficient of the left-normed bracket of word `w` of length `n`.
    lie: Vec<Vec<BigRational>>,
    /// Words whose left-normed bracket is needed, as a term or a prefix.
    needed: Vec<Vec<bool>>,
    assoc: FreeSeries,
}

impl BchSeries {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(PadicError::InvalidInput(
                "BCH degree must be at least 1".into(),
            ));
        }
        let e = FreeSeries::exp_letter(degree, 0).mul(&FreeSeries::exp_letter(degree, 1));
        let mut z = e;
        z.coeffs[0][0] = BigRational::zero();
        let assoc = FreeSeries::log_one_plus(&z);

        let mut lie: Vec<Vec<BigRational>> = (0..=degree)
            .map(|n| vec![BigRational::zero(); 1 << n])
            .collect();
        for n in 1..=degree {
            let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
            for w in 0..(1usize << n) {
                // [x x ...] = 0
                if n >= 2 && ((w >> (n - 1)) & 1) == ((w >> (n - 2)) & 1) {
                    continue;
                }
                lie[n][w] = &assoc.coeffs[n][w] * &inv_n;
            }
        }
        let mut needed: Vec<Vec<bool>> = lie
            .iter()
            .map(|row| row.iter().map(|c| !c.is_zero()).collect())
            .collect();
        for n in (1..degree).rev() {
            for w in 0..(1usize << n) {
                if needed[n + 1][w << 1] || needed[n + 1][(w << 1) | 1] {
                    needed[n][w] = true;
                }
            }
        }
        Ok(Self {
            degree,
            lie,
            needed,
            assoc,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `log(exp X exp Y)` in the free associative algebra.
    pub fn associative(&self) -> &FreeSeries {
        &self.assoc
    }

    /// Nonzero `(length, word, coefficient)` triples of the Lie form.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.lie.iter().enumerate().flat_map(|(n, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(w, c)| (n, w, c))
        })
    }

    /// `Phi(x, y)` up to degree `D` in the Lie algebra `alg`.
    pub fn evaluate<L: LieAlgebra>(&self, alg: &L, x: &L::Elem, y: &L::Elem) -> Result<L::Elem> {
        self.evaluate_up_to(alg, x, y, self.degree)
    }

    /// `Phi(x, y)` up to degree `max_degree <= D`.
    pub fn evaluate_up_to<L: LieAlgebra>(
        &self,
        alg: &L,
        x: &L::Elem,
        y: &L::Elem,
        max_degree: usize,
    ) -> Result<L::Elem> {
        let max_degree = max_degree.min(self.degree);
        let mut acc = alg.add(x, y)?;
        let mut prev: Vec<Option<L::Elem>> = vec![Some(x.clone()), Some(y.clone())];
        for n in 2..=max_degree {
            let mut cur: Vec<Option<L::Elem>> = vec![None; 1 << n];
            for (w, slot) in cur.iter_mut().enumerate() {
                if !self.needed[n][w] {
                    continue;
                }
                let Some(prefix) = &prev[w >> 1] else {
                    continue;
                };
                let last = if w & 1 == 0 { x } else { y };
                let value = alg.bracket(prefix, last)?;
                let c = &self.lie[n][w];
                if !c.is_zero() {
                    acc = alg.add(&acc, &alg.scale(c, &value)?)?;
                }
                *slot = Some(value);
            }
            prev = cur;
        }
        Ok(acc)
    }
}

/// `gl_d(Q_p)` with the commutator bracket. Rational scalars are read at
/// enough relative precision that scaling loses only their valuation.
#[derive(Debug, Clone, Copy, Default)]
pub struct MatrixLie;

impl LieAlgebra for MatrixLie {
    type Elem = PadicMatrix;

    fn add(&self, a: &PadicMatrix, b: &PadicMatrix) -> Result<PadicMatrix> {
        a.checked_add(b)
    }

    fn scale(&self, q: &BigRational, a: &PadicMatrix) -> Result<PadicMatrix> {
        let relative = (a.precision() - a.valuation()).max(1) + 4;
        a.scalar_mul(&PadicScalar::from_big_rational(a.ctx(), q, relative))
    }

    fn bracket(&self, a: &PadicMatrix, b: &PadicMatrix) -> Result<PadicMatrix> {
        a.commutator(b)
    }
}
