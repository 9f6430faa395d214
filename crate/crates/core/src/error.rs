use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// Constraint violations inside likelihoods are not errors: they evaluate to
/// `-inf`. Errors are reserved for malformed input and numerical breakdown.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller violated a usage contract (empty data, misapplied threshold, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// A numerical procedure (root finding, bracketing, ...) broke down.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// An optimizer failed to converge; carries the best state found.
    #[error("optimizer did not converge after {restarts} restarts (best log-likelihood {best_value}, at {best_point:?})")]
    NonConvergence {
        restarts: usize,
        best_point: Vec<f64>,
        best_value: f64,
    },
    /// Reading or writing a file failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

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

pub type Result<T> = std::result::Result<T, Error>;
