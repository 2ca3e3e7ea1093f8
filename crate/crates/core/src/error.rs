use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("case syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid case: {0}")]
    InvalidCase(String),
    #[error("unknown bus {0}")]
    UnknownBus(u32),
    #[error("unknown line index {0}")]
    UnknownLine(usize),
    #[error("network is already in per unit")]
    AlreadyNormalized,
    #[error("singular matrix (pivot column {column})")]
    Singular { column: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unbalanced injections: sum = {0:e}")]
    UnbalancedInjections(f64),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("demand {demand_mw} MW exceeds available capacity {capacity_mw} MW")]
    InsufficientCapacity { demand_mw: f64, capacity_mw: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("slack mismatch: result uses bus {result}, PTDF built for bus {ptdf}")]
    SlackMismatch { result: u32, ptdf: u32 },
    #[error("result has no voltage angles (PTDF or copperplate formulation)")]
    MissingAngles,
}

pub type Result<T> = std::result::Result<T, Error>;
