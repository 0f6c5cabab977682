//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the numeric kernels and the modules built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature failed to reach tolerance: estimate {estimate:e} with error {abs_error:e} after {evaluations} evaluations")]
    Accuracy {
        estimate: f64,
        abs_error: f64,
        evaluations: usize,
    },

    /// The integrand produced a NaN or infinite value.
    #[error("integrand not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    /// Root finding was given a bracket without a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The objective handed to the optimizer is not finite at the start point.
    #[error("objective is not finite at the start point")]
    Start,

    #[error("unknown catalog entry `{0}`")]
    Catalog(String),

    /// `E[w(X)]` is infinite or could not be resolved numerically.
    #[error("weight is not integrable: {0}")]
    Integrability(String),

    /// The survival (or distribution) function vanishes where a ratio needs it.
    #[error("tail error: {0}")]
    Tail(String),

    /// A weight or distribution evaluated to a non-finite value inside its domain.
    #[error("evaluation failed: {0}")]
    Evaluation(String),

    /// A likelihood term is infinite because an observation sits on the boundary.
    #[error("boundary observation at x = {0} makes the log-likelihood infinite")]
    Boundary(f64),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("binning error: {0}")]
    Binning(String),

    #[error("bootstrap failed: {0}")]
    Bootstrap(String),

    /// Malformed `name(k=v, ...)` specification text.
    #[error("cannot parse `{text}`: {reason}")]
    Parse { text: String, reason: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no usable rows in {0}")]
    Empty(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
