//! `[L, L] in p^e L` for a lattice given by a basis of integral matrices.
//!
//! Basis matrices are read as exact integer matrices through their
//! centered representatives modulo `p^M`; brackets and their coordinates
//! are found by exact Gaussian elimination over `Q` and then valued
//! p-adically.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{PadicError, Result};
use crate::hopf::rational_valuation;
use crate::padic::{PadicMatrix, PrimeContext};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerfulReport {
    pub powerful: bool,
    /// Minimal valuation among all bracket coordinates; `None` when every
    /// bracket vanishes.
    pub min_coordinate_valuation: Option<i64>,
    /// A pair `(i, j)` attaining the minimum.
    pub witness: Option<(usize, usize)>,
}

fn as_vector(m: &PadicMatrix) -> Result<Vec<BigRational>> {
    let ints = m
        .to_integers()
        .ok_or_else(|| PadicError::InvalidInput("lattice basis must be integral".into()))?;
    let modulus = m.ctx().pow(m.precision() as u32);
    let half = &modulus / 2;
    Ok(ints
        .into_iter()
        .map(|x| BigRational::from_integer(if x > half { x - &modulus } else { x }))
        .collect())
}

fn commutator(a: &[BigRational], b: &[BigRational], d: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                out[i * d + j] += &a[i * d + k] * &b[k * d + j] - &b[i * d + k] * &a[k * d + j];
            }
        }
    }
    out
}

/// Reduced row echelon form of the columns `basis` (as an `n x r` system),
/// reusable for several right-hand sides.
struct Solver {
    rows: Vec<Vec<BigRational>>,
    rank: usize,
    pivots: Vec<usize>,
    /// The elimination applied to the identity, to transform right-hand sides.
    transform: Vec<Vec<BigRational>>,
}

impl Solver {
    fn new(basis: &[Vec<BigRational>]) -> Self {
        let n = basis[0].len();
        let r = basis.len();
        let mut rows: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..r).map(|j| basis[j][i].clone()).collect())
            .collect();
        let mut transform: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(BigInt::from((i == j) as i32)))
                    .collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..r {
            let Some(pr) = (row..n).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(row, pr);
            transform.swap(row, pr);
            let inv = rows[row][col].recip();
            for x in rows[row].iter_mut() {
                *x *= &inv;
            }
            for x in transform[row].iter_mut() {
                *x *= &inv;
            }
            for i in 0..n {
                if i == row || rows[i][col].is_zero() {
                    continue;
                }
                let f = rows[i][col].clone();
                for j in 0..r {
                    let t = &f * &rows[row][j];
                    rows[i][j] -= t;
                }
                for j in 0..n {
                    let t = &f * &transform[row][j];
                    transform[i][j] -= t;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Self {
            rows,
            rank: row,
            pivots,
            transform,
        }
    }

    /// Coordinates of `target` in the basis, or `None` outside the span.
    fn solve(&self, target: &[BigRational]) -> Option<Vec<BigRational>> {
        let n = target.len();
        let r = self.rows.first().map_or(0, Vec::len);
        let b: Vec<BigRational> = (0..n)
            .map(|i| {
                self.transform[i]
                    .iter()
                    .zip(target)
                    .map(|(a, t)| a * t)
                    .sum()
            })
            .collect();
        if b[self.rank..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut out = vec![BigRational::zero(); r];
        for (k, &col) in self.pivots.iter().enumerate() {
            out[col] = b[k].clone();
        }
        Some(out)
    }
}

/// `c[i][j][k]` with `[b_i, b_j] = sum_k c[i][j][k] b_k`.
pub fn structure_constants(
    ctx: PrimeContext,
    basis: &[PadicMatrix],
) -> Result<Vec<Vec<Vec<BigRational>>>> {
    let first = basis
        .first()
        .ok_or_else(|| PadicError::InvalidInput("empty lattice basis".into()))?;
    for b in basis {
        ctx.check_same(&b.ctx())?;
        if b.dim() != first.dim() {
            return Err(PadicError::DimensionMismatch(b.dim(), first.dim()));
        }
    }
    let vectors = basis.iter().map(as_vector).collect::<Result<Vec<_>>>()?;
    let solver = Solver::new(&vectors);
    if solver.rank < basis.len() {
        return Err(PadicError::InvalidInput(
            "lattice basis is linearly dependent".into(),
        ));
    }
    let d = first.dim();
    let r = basis.len();
    let mut c = vec![vec![vec![BigRational::zero(); r]; r]; r];
    for i in 0..r {
        for j in i + 1..r {
            let bracket = commutator(&vectors[i], &vectors[j], d);
            let coords = solver.solve(&bracket).ok_or_else(|| {
                PadicError::Invariant(format!(
                    "not a Lie subalgebra: [b{i}, b{j}] leaves the span"
                ))
            })?;
            for (k, x) in coords.into_iter().enumerate() {
                c[j][i][k] = -x.clone();
                c[i][j][k] = x;
            }
        }
    }
    Ok(c)
}

pub fn powerful_check(ctx: PrimeContext, basis: &[PadicMatrix]) -> Result<PowerfulReport> {
    let c = structure_constants(ctx, basis)?;
    let r = c.len();
    let mut best: Option<(i64, (usize, usize))> = None;
    for i in 0..r {
        for j in i + 1..r {
            for c in &c[i][j] {
                if let Some(v) = rational_valuation(&ctx, c) {
                    if best.is_none_or(|(b, _)| v < b) {
                        best = Some((v, (i, j)));
                    }
                }
            }
        }
    }
    let eps = ctx.epsilon() as i64;
    Ok(PowerfulReport {
        powerful: best.is_none_or(|(v, _)| v >= eps),
        min_coordinate_valuation: best.map(|b| b.0),
        witness: best.map(|b| b.1),
    })
}

/// `{p^s E_ij}`: a basis of `p^s M_d(Z_p)`.
pub fn matrix_lattice_basis(
    ctx: PrimeContext,
    dim: usize,
    s: u32,
    precision: i64,
) -> Vec<PadicMatrix> {
    let scale = ctx.pow(s);
    (0..dim * dim)
        .map(|k| {
            let entries: Vec<BigInt> = (0..dim * dim)
                .map(|l| {
                    if l == k {
                        scale.clone()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect();
            PadicMatrix::from_integers(ctx, dim, &entries, precision).expect("square")
        })
        .collect()
}

/// `e = p E12, f = p E23, h = p E13` in `M_3`, so `[e, f] = p h`.
pub fn heisenberg_basis(ctx: PrimeContext, precision: i64) -> Vec<PadicMatrix> {
    [(0, 1), (1, 2), (0, 2)]
        .iter()
        .map(|&(i, j)| {
            let mut entries = vec![BigInt::zero(); 9];
            entries[i * 3 + j] = ctx.p_big();
            PadicMatrix::from_integers(ctx, 3, &entries, precision).expect("square")
        })
        .collect()
}

/// `p e, p f, p h` for the standard `sl_2` triple.
pub fn scaled_sl2_basis(ctx: PrimeContext, precision: i64) -> Vec<PadicMatrix> {
    let p = ctx.p_big();
    let z = BigInt::zero();
    [
        [z.clone(), p.clone(), z.clone(), z.clone()],
        [z.clone(), z.clone(), p.clone(), z.clone()],
        [p.clone(), z.clone(), z.clone(), -p.clone()],
    ]
    .iter()
    .map(|e| PadicMatrix::from_integers(ctx, 2, e, precision).expect("square"))
    .collect()
}

/// Diagonal matrices scaled by `p`.
pub fn scaled_diagonal_basis(ctx: PrimeContext, dim: usize, precision: i64) -> Vec<PadicMatrix> {
    (0..dim)
        .map(|k| {
            let entries: Vec<BigInt> = (0..dim * dim)
                .map(|l| {
                    if l == k * dim + k {
                        ctx.p_big()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect();
            PadicMatrix::from_integers(ctx, dim, &entries, precision).expect("square")
        })
        .collect()
}
