use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("cannot parse configuration file: {0}")]
    ConfigFile(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Table { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] gpdephase_core::Error),

    #[error("manifest verification failed: {0}")]
    Verification(String),

    #[error("GPDEPHASE_THREADS must be a positive integer, got {0:?}")]
    Threads(String),
}
