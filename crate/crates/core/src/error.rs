use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Newton-type iteration that ran out of steps; carries the best iterate as text.
    #[error("no convergence after {iterations} iterations (best iterate {best}, residual {residual})")]
    NoConvergence {
        iterations: usize,
        best: String,
        residual: f64,
    },

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("continuation failure on segment {segment}: {reason}")]
    ContinuationFailure { segment: usize, reason: String },

    #[error("data integrity: {0}")]
    DataIntegrity(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("singular fiber at parameter {0}")]
    SingularFiber(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericFailure(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
