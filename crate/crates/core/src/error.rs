use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("matrix is numerically singular (smallest singular value {sigma_min:e}, condition {condition:e})")]
    Singular { sigma_min: f64, condition: f64 },

    #[error("eigenvalue {eigenvalue} has modulus below tolerance; Jordan blocks must have non-zero modulus")]
    ModulusZero { eigenvalue: String },

    #[error("unsupported Jordan structure near eigenvalue {cluster}: {reason}")]
    UnsupportedStructure { cluster: String, reason: String },

    #[error("input basis is rank deficient: {0}")]
    RankDeficient(String),

    #[error("orbit frame collapsed at iterate {k} (smallest singular value {sigma_min:e})")]
    DegenerateOrbit { k: usize, sigma_min: f64 },

    #[error("subspace is not invariant under the operator (residual {residual:e})")]
    InvarianceViolation { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
