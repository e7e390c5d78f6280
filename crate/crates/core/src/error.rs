use std::fmt;

use thiserror::Error;

/// Why an inner iteration was abandoned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    /// Increment grew past the configured multiple of the first increment.
    Blowup,
    /// A pressure or increment became NaN or infinite.
    NonFinite,
    /// The iteration limit was reached before the tolerance.
    IterationLimit,
    /// A linear solve failed to reach its tolerance.
    LinearSolve,
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DivergenceKind::Blowup => "blowup",
            DivergenceKind::NonFinite => "non-finite",
            DivergenceKind::IterationLimit => "iteration-limit",
            DivergenceKind::LinearSolve => "linear-solve",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("grid: {0}")]
    Grid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("GMRES breakdown with relative residual {residual:e}")]
    Breakdown { residual: f64 },

    #[error("matrix of size {n} exceeds the dense limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("boundary: {0}")]
    Boundary(String),

    #[error("time step {step} diverged ({kind})")]
    Diverged { step: usize, kind: DivergenceKind },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
