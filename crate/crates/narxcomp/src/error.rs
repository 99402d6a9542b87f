use std::path::PathBuf;

/// Failures of the runner, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad flags, config keys, model files or output paths.
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// The computation itself failed.
    #[error("numeric failure: {0}")]
    Numeric(#[from] narxcomp_core::Error),
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Io { .. } => 2,
            AppError::Numeric(_) => 3,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
