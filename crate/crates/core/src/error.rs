use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation was called outside its domain of definition (e.g. a local slope
    /// at a point where `f` does not vanish).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The mathematical object asked for does not exist (e.g. a destabilizer below
    /// the stability radius).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Numerical procedure failed; carries the best iterate when one exists.
    #[error("computational error: {message}")]
    Computational {
        message: String,
        best: Option<Vec<f64>>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn computational(message: impl Into<String>) -> Self {
        Error::Computational {
            message: message.into(),
            best: None,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}
