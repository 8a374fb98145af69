use thiserror::Error;

/// Errors produced by state construction, phase-space routines and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state has no recorded subsystem dimensions")]
    MissingSubsystemDims,

    #[error("channel sampling failed after {0} attempts")]
    SamplingFailed(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
