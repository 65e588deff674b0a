use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },

    #[error("step {step}: {source}")]
    Step { step: usize, source: relay_core::Error },

    #[error(transparent)]
    Core(#[from] relay_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("worker pool: {0}")]
    Pool(String),
}

impl SimError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        SimError::Config { field: field.into(), message: message.into() }
    }

    /// Configuration problems (unreadable, unparsable or inconsistent input)
    /// as opposed to failures while running.
    pub fn is_config(&self) -> bool {
        match self {
            SimError::Config { .. } | SimError::Read { .. } | SimError::Parse { .. } => true,
            SimError::Step { source, .. } | SimError::Core(source) => {
                matches!(source, relay_core::Error::Config(_))
            }
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
