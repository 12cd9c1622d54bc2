use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error in equation: {0}")]
    Syntax(String),
    #[error("coefficient at position {0} is zero")]
    ZeroCoefficient(usize),
    #[error("equation must have at least {need} variables, got {got}")]
    TooFewVariables { need: usize, got: usize },
    #[error("equation is inhomogeneous (K = {0}) but a homogeneous equation is required")]
    Inhomogeneous(i64),
    #[error("equation is homogeneous but an inhomogeneous equation is required")]
    Homogeneous,
    #[error("tuple has length {got}, equation has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("gcd {gcd} of the coefficients does not divide K = {constant}")]
    GcdDoesNotDivide { gcd: i64, constant: i64 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is not {0}-partite")]
    NotPartite(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("domain exhausted while assigning variable {0}")]
    DomainExhausted(u32),
    #[error("dependent variable {0} took a non-integral value")]
    NonIntegral(u32),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("duplicate interpolation point")]
    DuplicatePoints,
    #[error("negative intermediate value during digit extraction")]
    NegativeIntermediate,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
