use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("covariance matrix violates the uncertainty relation (min eigenvalue of γ + iσ is {min_eigenvalue:.6e})")]
    Unphysical { min_eigenvalue: f64 },

    #[error("matrix is not symplectic (residual {0:e})")]
    NotSymplectic(f64),

    #[error("channel is not completely positive (min eigenvalue {min_eigenvalue:.6e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("state is not pure (max |ν - 1| = {0:e})")]
    NotPure(f64),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cutoff too small: truncated tail mass {tail:e} exceeds {limit:e}")]
    Truncation { tail: f64, limit: f64 },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
