use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {reason}")]
    Format {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    /// Document (JSON/CSV) that could not be decoded.
    #[error("{path}: {reason}")]
    Document { path: PathBuf, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular coefficient: {0}")]
    Singular(String),

    #[error("positivity undefined: {0}")]
    UndefinedPositivity(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("edge ({0}, {1}) is not in the graph")]
    NoSuchEdge(u64, u64),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
