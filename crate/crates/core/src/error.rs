use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter combination cannot be honoured.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical routine failed to reach its target accuracy.
    #[error("numerical failure: {0}")]
    Numeric(String),
    /// A characteristic-function handle failed at a particular frequency.
    #[error("evaluation failed at x = {x}: {source}")]
    Evaluation {
        x: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid user input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Domain(_) | Error::Config(_) => true,
            Error::Evaluation { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
