use thiserror::Error;

/// Errors raised by the p-adic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),

    #[error("element is not a unit (valuation {0})")]
    NotAUnit(i64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("outside the convergence domain: valuation {found} < required {required}")]
    OutsideDomain { found: i64, required: i64 },

    #[error("element is not in the requested subgroup: {0}")]
    NotInSubgroup(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("infinite valuation: {0}")]
    InfiniteValuation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;
