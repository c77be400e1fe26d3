use thiserror::Error;

/// Errors raised by the numerical kernels and the domain solvers.
///
/// Payloads are stored as `f64` regardless of the scalar type the kernel was
/// instantiated with, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite field value at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("degenerate gradient at {point:?}: |grad u| = {grad_norm:e}")]
    DegenerateGradient { point: Vec<f64>, grad_norm: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, state: Vec<f64>, reason: String },

    #[error("no convergence after {iterations} iterations (last estimate {last:e})")]
    NoConvergence { iterations: usize, last: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<S: Into<String>>(msg: S) -> Error {
    Error::Domain(msg.into())
}
