use thiserror::Error;

/// Errors raised by the domain, map and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: expected {expected} coordinates, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("isotropy element is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("unsupported embedding: {0}")]
    UnsupportedEmbedding(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoRoot { what: String, lo: f64, hi: f64 },

    #[error("quadrature did not reach tolerance {tolerance:.1e} (last error estimate {estimate:.3e})")]
    QuadratureTolerance { tolerance: f64, estimate: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
