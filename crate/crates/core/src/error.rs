use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("partition: {0}")]
    Partition(String),

    #[error("{0}")]
    Config(String),

    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),

    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn partition(msg: impl Into<String>) -> Self {
        Error::Partition(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
