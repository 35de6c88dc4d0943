use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ndlab_core::Error),
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("artifact line {line}: {msg}")]
    Artifact { line: usize, msg: String },
}

impl HarnessError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), msg: e.to_string() }
    }
}
