use thiserror::Error;

/// Errors raised by the operator, quadrature and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("multi-index has length {found}, operator order is {expected}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("negative coordinate {value} at index {index}")]
    NegativeCoordinate { index: usize, value: f64 },

    #[error("mass {mass} leaves the unit ball")]
    MassExceedsOne { mass: f64 },

    #[error("expected a vector of mass {expected}, got {found}")]
    WrongMass { expected: f64, found: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypermatrix is not symmetric: P{first:?},{k} = {a} but P{second:?},{k} = {b}")]
    Asymmetric {
        first: Vec<usize>,
        second: Vec<usize>,
        k: usize,
        a: f64,
        b: f64,
    },

    #[error("negative hypermatrix entry {value} at {idx:?},{k}")]
    NegativeEntry { idx: Vec<usize>, k: usize, value: f64 },

    #[error("conflicting values for entry {idx:?},{k}: {a} vs {b}")]
    ConflictingEntry { idx: Vec<usize>, k: usize, a: f64, b: f64 },

    #[error("hypermatrix is not stochastic: {violations} violating rows (worst deviation {worst})")]
    NotStochastic { violations: usize, worst: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("polynomial degree {degree} exceeds the maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("invalid breakpoints: {0}")]
    Breakpoints(String),

    #[error("point {0} outside [0, 1]")]
    OutsideDomain(f64),

    #[error("function is not a member of the domain set: {0}")]
    NotInDomain(String),

    #[error("certificate unusable: {0}")]
    Certificate(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
