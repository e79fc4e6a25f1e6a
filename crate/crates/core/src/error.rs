use thiserror::Error;

/// Errors raised by the numerical routines and the model layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence in {routine}: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    #[error("divergence detected: {0}")]
    DivergenceDetected(String),

    #[error("root not bracketed: f({lower}) = {f_lower}, f({upper}) = {f_upper}")]
    NoBracket {
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("infeasible constraint targets: {0}")]
    Infeasible(String),

    #[error("exponent {exponent} exceeds overflow guard {bound}")]
    OverflowGuard { exponent: f64, bound: f64 },

    #[error("unknown ablation candidate `{0}`")]
    UnknownCandidate(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("route mismatch in {what}: {first} vs {second}")]
    RouteMismatch {
        what: &'static str,
        first: f64,
        second: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn non_convergence(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            routine,
            detail: detail.into(),
        }
    }
}
