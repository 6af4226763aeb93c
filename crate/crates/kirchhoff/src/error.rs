//! Error type shared across the crate.

/// Which side of a branch's attained range a requested value fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeSide {
    /// Below the infimum of the attained values.
    Below,
    /// Above the supremum reachable in finite precision.
    Above,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("t = {t:.6e} lies outside the branch interval ({lo:.6e}, {hi:.6e})")]
    OutOfBranch { t: f64, lo: f64, hi: f64 },

    #[error("lambda = {lam:.6e} is not attained on the branch ({side:?} its range)")]
    OutOfRange { lam: f64, side: RangeSide },

    #[error("no crossing of the fixed-point equation: {reason}")]
    NoCrossing { reason: String },

    #[error("iterates collapsed toward zero ({detail})")]
    DegenerateLimit { detail: String },

    #[error("saddle inequality violated: {detail} (margin {margin:.3e} beyond eps {eps:.3e})")]
    SaddleViolation {
        detail: String,
        margin: f64,
        eps: f64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
