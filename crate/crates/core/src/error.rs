//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by model construction, numerical routines, detectors and
/// the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or input violated a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),
    /// The model lacks a property the operation needs (positive marginal,
    /// mutual absolute continuity, nonzero variance, dependence).
    #[error("degenerate model: {0}")]
    Degenerate(String),
    /// An argument fell outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Mismatched vector or matrix dimensions.
    #[error("shape error: {0}")]
    Shape(String),
    /// An enumeration or size guard was exceeded.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A spectral profile has a nontrivial eigenvalue of modulus one.
    #[error("singular profile: {0}")]
    SingularProfile(String),
    /// Observed data produced a non-finite log-likelihood ratio.
    #[error("data error: {0}")]
    Data(String),
    /// The requested method is not available for this model family.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An internal consistency check failed.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// A configuration file could not be parsed or failed validation.
    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },
    /// Filesystem or formatting failure.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a size guard rather than invalid input.
    #[must_use]
    pub fn is_capacity(&self) -> bool {
        matches!(self, Self::Capacity(_))
    }

    /// Prefixes the message with `ctx`, keeping the variant.
    #[must_use]
    pub fn context(self, ctx: &str) -> Self {
        let wrap = |m: String| format!("{ctx}: {m}");
        match self {
            Self::Validation(m) => Self::Validation(wrap(m)),
            Self::Degenerate(m) => Self::Degenerate(wrap(m)),
            Self::Domain(m) => Self::Domain(wrap(m)),
            Self::Shape(m) => Self::Shape(wrap(m)),
            Self::Capacity(m) => Self::Capacity(wrap(m)),
            Self::SingularProfile(m) => Self::SingularProfile(wrap(m)),
            Self::Data(m) => Self::Data(wrap(m)),
            Self::Unsupported(m) => Self::Unsupported(wrap(m)),
            Self::Invariant(m) => Self::Invariant(wrap(m)),
            Self::Io(m) => Self::Io(wrap(m)),
            Self::Config {
                path,
                line,
                message,
            } => Self::Config {
                path,
                line,
                message: wrap(message),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
