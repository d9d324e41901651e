use thiserror::Error;

/// Errors raised by parameter validation, analytic evaluation and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("series did not converge after {terms} terms (last relative term {last_term:e})")]
    SeriesNotConverged { terms: usize, last_term: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e} after {intervals} intervals")]
    QuadratureNotConverged {
        estimate: f64,
        error_bound: f64,
        intervals: usize,
    },

    #[error("ill-conditioned AR fit at order {order}: {reason} (try a larger bias_eps or a smaller order)")]
    IllConditioned { order: usize, reason: String },

    #[error("insufficient data for {op}: need {needed}, got {got}")]
    InsufficientData {
        op: &'static str,
        needed: usize,
        got: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        op,
        reason: reason.into(),
    }
}
