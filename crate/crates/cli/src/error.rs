use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] evosoft::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad JSON in {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

impl CliError {
    /// 2 for usage and parameter errors, 1 for everything that failed at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(evosoft::Error::InvalidParam(_)) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
