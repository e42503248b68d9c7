//! Exact JSON encodings. Every number is a decimal string; nothing passes
//! through floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::scalar::INFINITE;
use super::{PadicMatrix, PadicScalar, PrimeContext};
use crate::error::{PadicError, Result};

/// Parses `"-12"` or `"7/9"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || PadicError::InvalidInput(format!("bad number {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(PadicError::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn fmt_bound(v: i64) -> String {
    if v == INFINITE {
        "inf".to_string()
    } else {
        v.to_string()
    }
}

fn parse_bound(s: &str) -> Result<i64> {
    if s == "inf" {
        return Ok(INFINITE);
    }
    s.parse()
        .map_err(|_| PadicError::InvalidInput(format!("bad integer {s:?}")))
}

/// `{"value", "valuation", "unit", "precision"}`; the valuation and the
/// precision are `"inf"` for the exact zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
}

impl ScalarJson {
    pub fn from_scalar(x: &PadicScalar) -> Self {
        Self {
            value: x.to_rational().to_string(),
            valuation: Some(fmt_bound(x.valuation_bound())),
            unit: Some(x.unit().to_string()),
            precision: Some(fmt_bound(x.precision())),
        }
    }

    /// Reads the scalar back. When `valuation` and `unit` are present they
    /// are authoritative; otherwise `value` is read at `precision` (or at
    /// `default_precision`).
    pub fn to_scalar(&self, ctx: PrimeContext, default_precision: i64) -> Result<PadicScalar> {
        let precision = match &self.precision {
            Some(s) => parse_bound(s)?,
            None => default_precision,
        };
        if precision == INFINITE {
            return Ok(PadicScalar::zero(ctx));
        }
        if let (Some(v), Some(u)) = (&self.valuation, &self.unit) {
            let v = parse_bound(v)?;
            let u: BigInt = u
                .parse()
                .map_err(|_| PadicError::InvalidInput(format!("bad unit {u:?}")))?;
            return PadicScalar::from_parts(ctx, v, u, precision);
        }
        let q = parse_rational(&self.value)?;
        PadicScalar::from_rational(ctx, q.numer().clone(), q.denom().clone(), precision)
    }
}

/// A number given either as a bare string or as a full [`ScalarJson`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberJson {
    Plain(String),
    Full(ScalarJson),
}

impl NumberJson {
    pub fn to_scalar(&self, ctx: PrimeContext, precision: i64) -> Result<PadicScalar> {
        match self {
            NumberJson::Plain(s) => {
                let q = parse_rational(s)?;
                PadicScalar::from_rational(ctx, q.numer().clone(), q.denom().clone(), precision)
            }
            NumberJson::Full(s) => s.to_scalar(ctx, precision),
        }
    }
}

/// `{"p": 3, "precision": 12, "rows": [["1", "3"], ["0", "4"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: u64,
    pub precision: i64,
    pub rows: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &PadicMatrix) -> Self {
        let d = m.dim();
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| m.entry(i, j).to_rational().to_string())
                    .collect()
            })
            .collect();
        Self {
            p: m.ctx().p() as u64,
            precision: m.precision(),
            rows,
        }
    }

    pub fn to_matrix(&self) -> Result<PadicMatrix> {
        let ctx = PrimeContext::new(self.p)?;
        let d = self.rows.len();
        let mut entries = Vec::with_capacity(d * d);
        for row in &self.rows {
            if row.len() != d {
                return Err(PadicError::DimensionMismatch(row.len(), d));
            }
            for s in row {
                entries.push(parse_rational(s)?);
            }
        }
        PadicMatrix::from_rationals(ctx, d, &entries, self.precision)
    }
}

/// A value table or coefficient list: `{"p", "precision", "values": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub p: u64,
    pub precision: i64,
    pub values: Vec<NumberJson>,
}

impl TableJson {
    pub fn from_scalars(ctx: PrimeContext, precision: i64, values: &[PadicScalar]) -> Self {
        Self {
            p: ctx.p() as u64,
            precision,
            values: values
                .iter()
                .map(|x| NumberJson::Full(ScalarJson::from_scalar(x)))
                .collect(),
        }
    }

    pub fn to_scalars(&self) -> Result<(PrimeContext, Vec<PadicScalar>)> {
        let ctx = PrimeContext::new(self.p)?;
        let values = self
            .values
            .iter()
            .map(|v| v.to_scalar(ctx, self.precision))
            .collect::<Result<Vec<_>>>()?;
        Ok((ctx, values))
    }
}
