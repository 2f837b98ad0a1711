use thiserror::Error;

/// Errors raised across the toolkit. Indices in messages are 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix does not have se(3) structure: {0}")]
    MalformedMatrix(String),

    #[error("joint axis is not normalized: {0}")]
    BadAxis(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not positive definite: {0}")]
    NonPositiveDefinite(String),

    #[error("negative stiffness eigenvalue {0:e} below tolerance")]
    NegativeEigenvalue(f64),

    #[error("frame mismatch: {expected:?} vs {actual:?}")]
    FrameMismatch {
        expected: crate::connection::Frame,
        actual: crate::connection::Frame,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("loop path is not closed or too short: {0}")]
    OpenPath(String),

    #[error("integration diverged at t = {t} s (|qdot| = {qdot_norm:e})")]
    IntegrationDiverged { t: f64, qdot_norm: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
