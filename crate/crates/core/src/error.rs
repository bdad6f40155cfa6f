//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Hilbert dimension {dim} exceeds configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("undefined at omega = {omega} rad/s: {reason}")]
    UndefinedPoint { omega: f64, reason: String },

    #[error("fit did not converge after {iterations} iterations (best residual {residual:e})")]
    FitNotConverged {
        iterations: usize,
        residual: f64,
        /// Flattened best-so-far (lambda, kappa, omega_m) triples.
        best_params: Vec<f64>,
    },

    #[error("propagation failed at step {step}: {reason}")]
    PropagationFailed { step: usize, reason: String },

    #[error("dynamical map at time index {index} is ill-conditioned (cond {cond:e})")]
    SingularMap { index: usize, cond: f64 },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("expectation value has non-negligible imaginary part {imag:e}")]
    NonRealExpectation { imag: f64 },

    #[error("orthogonality loss in chain recurrence at index {index} (beta = {beta:e})")]
    RecurrenceBreakdown { index: usize, beta: f64 },

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("regime check failed: {0}")]
    RegimeViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter(_) | Error::RegimeViolation(_) => 2,
            Error::DimensionCap { .. } => 4,
            _ => 3,
        }
    }
}
