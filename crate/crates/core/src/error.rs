use thiserror::Error;

/// Errors raised by the weak-measurement toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Pre- and post-selected states are (numerically) orthogonal, so the
    /// weak value diverges.
    #[error("orthogonal postselection: |<post|pre>| = {overlap:e}")]
    OrthogonalPostselection { overlap: f64 },

    /// A quadrature grid or angle grid cannot resolve the requested quantity.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A search range does not contain the requested extremum.
    #[error("range error: {0}")]
    Range(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Short machine-readable tag used by the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::OrthogonalPostselection { .. } => "orthogonal_postselection",
            Error::Resolution(_) => "resolution",
            Error::Range(_) => "range",
        }
    }

    /// Process exit code: 3 for resolution failures, 2 for every other domain error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resolution(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
