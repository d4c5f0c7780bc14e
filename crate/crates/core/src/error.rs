use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition on a map or profile does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// An iterative method did not reach its tolerance.
    #[error("numerical failure in {what}: residual {residual:e}")]
    Numerical { what: String, residual: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn numerical(what: impl Into<String>, residual: f64) -> Self {
        Error::Numerical { what: what.into(), residual }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Numerical { .. } => "numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
