use std::path::PathBuf;

use thiserror::Error;

/// Errors that stop a batch as a whole.
#[derive(Debug, Error)]
pub enum BatchError {
    #[error("algorithm {0:?} is already registered")]
    DuplicateAlgorithmName(String),

    #[error("unknown algorithm {0:?} (see --list-algorithms)")]
    UnknownAlgorithm(String),

    #[error("{algorithm}: {reason}")]
    InvalidParameter { algorithm: String, reason: String },

    #[error("invalid batch: {0}")]
    InvalidJob(String),

    #[error("attribute list {path}: {source}")]
    AttributeList {
        path: PathBuf,
        source: gaitnl_core::Error,
    },

    #[error("output directory {path} is not writable: {reason}")]
    OutputDirUnwritable { path: PathBuf, reason: String },

    #[error("no runnable tasks: every task was skipped")]
    NoRunnableTasks,
}

impl BatchError {
    pub fn kind(&self) -> &'static str {
        match self {
            BatchError::DuplicateAlgorithmName(_) => "DuplicateAlgorithmName",
            BatchError::UnknownAlgorithm(_) => "UnknownAlgorithm",
            BatchError::InvalidParameter { .. } => "InvalidParameter",
            BatchError::InvalidJob(_) => "InvalidJob",
            BatchError::AttributeList { .. } => "AttributeList",
            BatchError::OutputDirUnwritable { .. } => "OutputDirUnwritable",
            BatchError::NoRunnableTasks => "NoRunnableTasks",
        }
    }
}

/// Why a single task did not produce results. `kind` is a short
/// machine-readable tag, `message` the human explanation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {message}")]
pub struct TaskError {
    pub kind: String,
    pub message: String,
}

impl TaskError {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Self { kind: kind.into(), message: message.into() }
    }
}

impl From<gaitnl_core::Error> for TaskError {
    fn from(e: gaitnl_core::Error) -> Self {
        Self::new(e.kind(), e.to_string())
    }
}
