//! Error type for the harness: core errors plus IO, format, and training
//! failures.

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum DeskError {
    #[error(transparent)]
    Core(#[from] mixforge_core::CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("training diverged: non-finite loss at step {step}")]
    Diverged { step: usize },
}

impl DeskError {
    pub fn io(path: impl AsRef<Path>) -> impl FnOnce(std::io::Error) -> DeskError {
        let path = path.as_ref().to_path_buf();
        move |source| DeskError::Io { path, source }
    }

    pub fn format(path: impl AsRef<Path>, message: impl Into<String>) -> DeskError {
        DeskError::Format { path: path.as_ref().to_path_buf(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, DeskError>;
