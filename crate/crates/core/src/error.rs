use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("p must be an odd prime (got {0})")]
    EvenPrime(u32),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("right-hand side is not in the image")]
    NoSolution,
    #[error("d^{next} o d^{degree} is nonzero")]
    MalformedComplex { degree: i32, next: i32 },
    #[error("invalid splitting: {0}")]
    BadSplitting(String),
    #[error("resolution length must be at least 1 (got {0})")]
    BadLength(usize),
    #[error("degree {requested} is outside the certified range (certified through {certified})")]
    UncertifiedDegree { requested: i64, certified: i64 },
    #[error("the valuation is undefined on the identity element")]
    IdentityElement,
    #[error("arity {requested} exceeds the available bound {bound}")]
    ArityOverflow { requested: usize, bound: usize },
    #[error("degree bookkeeping violated: {0}")]
    DegreeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
