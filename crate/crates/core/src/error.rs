use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable x{index} out of range for arity {n}")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("arity {n} outside supported range {min}..={max}")]
    ArityOutOfRange { n: usize, min: usize, max: usize },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("order k={k} outside 1..={n}")]
    OrderOutOfRange { k: usize, n: usize },
    #[error("matrix is singular over GF(2)")]
    SingularMatrix,
    #[error("zero mask is not a linear function")]
    ZeroMask,
    #[error("degree {degree} exceeds {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("non-deterministic output on input {input}: phase sum {value} mod 2")]
    NonDeterministic { input: usize, value: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("qubit count {0} outside 1..=20")]
    QubitCount(usize),
    #[error("generators do not commute: {0} and {1}")]
    NonCommuting(usize, usize),
    #[error("generators are dependent")]
    DependentGenerators,
    #[error("zero polynomial has a coefficient that is not an even integer at monomial {0}")]
    NotZeroPoly(usize),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("graph has a cycle through node {0}")]
    Cycle(usize),
    #[error("schedule violation on edge {from} -> {to}")]
    ScheduleViolation { from: usize, to: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
