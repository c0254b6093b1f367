use thiserror::Error;

/// Errors raised by the numerical routines and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A quadrature or root-finding routine exhausted its refinement budget.
    #[error("numerical failure in {context}: achieved error estimate {estimate:e}")]
    Numerical { context: &'static str, estimate: f64 },

    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent constants or configuration values.
    #[error("configuration error: {0}")]
    Config(String),

    /// A per-coordinate failure inside a batch operation.
    #[error("coordinate {index}: {source}")]
    Coordinate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("insufficient draws: {got} (need at least {need})")]
    InsufficientDraws { got: usize, need: usize },

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn at(self, index: usize) -> Self {
        Error::Coordinate {
            index,
            source: Box::new(self),
        }
    }

    /// True for failures the CLI reports with the numerical-failure exit code.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical { .. } => true,
            Error::Coordinate { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
