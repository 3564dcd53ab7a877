use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants mirror the failure classes the command line maps onto exit
/// codes: structural and domain problems are input errors, numeric failures
/// are reported separately.
#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("unsupported scenario: {0}")]
    Unsupported(String),
    #[error("flow error after {iterations} iterations: {message}")]
    Flow { message: String, iterations: usize, best_residual: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// True for failures caused by the input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Structural(_) | Error::Domain(_) | Error::Unsupported(_) | Error::Parse(_))
    }
}
