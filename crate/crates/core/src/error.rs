use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid degree ({d1}, {d2}): need d1 >= d2 > 0")]
    InvalidDegree { d1: i64, d2: i64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("matrix is not surjective over the integers (invariant factors {0:?})")]
    NotSurjective(Vec<i64>),

    #[error("min-value system has no solution: {0}")]
    NoSolution(String),

    #[error("min-value system has {0} distinct solutions")]
    MultipleSolutions(usize),

    #[error("nonzero residual for collection {index}: {value}")]
    ResidualNonzero { index: usize, value: String },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("enumeration guard exceeded: {0} equations (limit {1})")]
    GuardExceeded(usize, usize),

    #[error("kmax {kmax} out of range (max {max})")]
    KmaxOutOfRange { kmax: usize, max: usize },

    #[error("node budget of {0} exceeded")]
    BudgetExceeded(u64),

    #[error("insufficient cone counts: have sizes up to {have}, need {need}")]
    InsufficientCounts { have: usize, need: usize },

    #[error("inconsistent Betti numbers: {0}")]
    InconsistentBetti(String),

    #[error("unknown dialect '{0}'")]
    UnknownDialect(String),

    #[error("wrong vector length: expected {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
