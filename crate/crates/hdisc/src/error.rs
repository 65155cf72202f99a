use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unknown keys, unreadable or malformed inputs.
    #[error("configuration error: {0}")]
    Config(String),
    /// The inputs are well-formed but the computation is undefined for them.
    #[error("domain error: {0}")]
    Domain(#[from] hdisc_core::Error),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn io(path: &Path, message: String) -> Self {
        CliError::Io { path: path.display().to_string(), message }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}
