use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("fit quality too low: r^2 = {0:.4}")]
    FitQuality(f64),
    #[error("log-weight overflow: {0:.1} exceeds 700")]
    Overflow(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by the caller's parameters rather than by the numerics.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Precondition(_) | Error::Resolution(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
