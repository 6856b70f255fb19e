use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Core(#[from] hiernet_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for configuration problems, 3 when a fit
    /// lacks data, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use hiernet_core::Error as E;
        match self {
            Error::Config { .. } | Error::Core(E::Config(_)) | Error::Usage(_) => 2,
            Error::Core(E::InsufficientData { .. } | E::DegenerateFit(_)) => 3,
            _ => 1,
        }
    }
}

impl From<hiernet_core::ConfigError> for Error {
    fn from(e: hiernet_core::ConfigError) -> Self {
        Error::config(e.key(), e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
