use std::path::PathBuf;

use s3flow::{FlowError, GeometryError, OracleError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Config {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("oracle `{name}` does not apply: {reason}")]
    Inapplicable { name: String, reason: String },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// 1 for anything the caller got wrong, 2 for a computation that failed.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Io { .. } | Self::Config { .. } | Self::Inapplicable { .. } => 1,
            Self::Flow(FlowError::InvalidConfig(_) | FlowError::InvalidInitialState(_)) => 1,
            Self::Flow(_) | Self::Geometry(_) | Self::Oracle(_) => 2,
        }
    }
}
