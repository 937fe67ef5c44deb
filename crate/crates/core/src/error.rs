use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("weight parameter k = {0} out of range (need k >= {1})")]
    BadWeight(u32, u32),
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(u32, u32),
    #[error("matrix has determinant {0}, expected {1}")]
    BadDeterminant(String, String),
    #[error("discriminant {0} is a perfect square or not positive")]
    BadDiscriminant(String),
    #[error("form {0} is not in F_p for p = {1}")]
    NotInFp(String, u64),
    #[error("modular symbol is not p-new (residual {0})")]
    NotPNew(String),
    #[error("cocycle is not cuspidal; the lift is only defined for cuspidal cocycles")]
    NotCuspidal,
    #[error("l = {0} must be a prime different from p = {1}")]
    BadHeckePrime(u64, u64),
    #[error("gcd({0}, {1}) != 1")]
    NotCoprime(String, u64),
    #[error("vector is not in the span of the basis")]
    NotInSpan,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
