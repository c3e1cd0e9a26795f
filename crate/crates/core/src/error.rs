use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("division by a value that is zero at the working precision")]
    DivisionByZero,
    #[error("matrix is singular at the working precision")]
    SingularMatrix,
    #[error("not a prime: {0}")]
    NotPrime(u32),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("guard `{guard}` exceeded: {detail}")]
    Guard { guard: &'static str, detail: String },
    #[error("multiplier is singular or non-constant on the zero cell (alpha = {0})")]
    SingularMultiplier(String),
    #[error("precision exhausted after {0} digits")]
    PrecisionExhausted(i64),
    #[error("no digit matches the residue at expansion step {0}")]
    NoMatchingDigit(i64),
}

pub type Result<T> = std::result::Result<T, Error>;
