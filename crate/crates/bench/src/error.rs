use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown detector `{name}` at detectors[{index}] (registered: padd, ddm, eddm, adwin, cddd)")]
    Roster { name: String, index: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] padd_core::Error),
}

impl BenchError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        BenchError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn input(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        BenchError::Input {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
