use thiserror::Error;

/// Errors raised by the coupling, transfer, search and sweep layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Quadrature panel doubling ran out before reaching the requested accuracy.
    #[error("quadrature did not converge: estimated error {achieved:e} exceeds target {target:e}")]
    Convergence { achieved: f64, target: f64 },

    /// The maximizer hit a bracket endpoint, so the maximum is not inside it.
    #[error("maximum of the objective is not inside the bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    /// A sweep was requested without the inputs it needs.
    #[error("invalid sweep: {0}")]
    Sweep(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
