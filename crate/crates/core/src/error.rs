//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model construction, solvers and scenario plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("emitters {i} and {j} coincide; the dipole kernels diverge at zero separation")]
    SingularSeparation { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subsystem {site} is a {found}, expected a {expected}")]
    WrongSubsystem { site: usize, expected: &'static str, found: &'static str },

    #[error("coupling matrix is not circulant (deviation {deviation:e}); ring-only operation")]
    NotCirculant { deviation: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("step size underflow at t = {t}: h = {h:e}; the problem is stiff at these tolerances (loosen rtol/atol or use the ladder propagator)")]
    Stiffness { t: f64, h: f64 },

    #[error("steady state is not unique: null space dimension {dimension}")]
    MultipleSteadyStates { dimension: usize },

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("io error on {path}: {source}")]
    Io { path: String, #[source] source: std::io::Error },

    #[error("csv error on {path}: {source}")]
    Csv { path: String, #[source] source: csv::Error },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }
}
