use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record file {path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Core(#[from] rstre_core::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Usage(_) => 2,
            HarnessError::Io { .. } | HarnessError::Format { .. } => 3,
            HarnessError::Core(rstre_core::Error::InvalidArgument(_)) => 2,
            HarnessError::Core(_) => 1,
        }
    }
}

pub fn io_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}
