use thiserror::Error;

/// Failure kinds shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e}, tolerance {tolerance:.3e})")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix is rank deficient (smallest singular value {min_singular_value:.3e}, tolerance {tolerance:.3e})")]
    RankDeficient { min_singular_value: f64, tolerance: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported function: {0}")]
    UnsupportedFunction(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
