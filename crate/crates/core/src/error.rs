use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("element {element} does not belong to {field}")]
    FieldMismatch { element: String, field: String },
    #[error("zero ideal has infinite index")]
    ZeroIdeal,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue system too large: {size} exceeds cap {cap}")]
    ResidueCapExceeded { size: String, cap: u64 },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("polynomial is not univariate")]
    NotUnivariate,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("hypotheses of the three-quadratics criterion fail: {0}")]
    ConditionsNotMet(String),
    #[error("budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("not a partition on the window: {0}")]
    NotAPartition(String),
    #[error("integer overflow: {0}")]
    Overflow(&'static str),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
