use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{count} task(s) failed, see {}", manifest.display())]
    TaskFailures { count: usize, manifest: PathBuf },
    #[error("{0}")]
    Usage(String),
    #[error("internal assertion failed: {0}")]
    Assertion(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: gridntl_core::Error,
    },
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, line: u64, message: impl Into<String>) -> Self {
        AppError::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    /// 1 usage, 2 data, 3 internal assertion.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Core {
                source: gridntl_core::Error::Config(_),
                ..
            } => 1,
            AppError::Assertion(_) => 3,
            _ => 2,
        }
    }
}

/// Attaches a context line to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> AppResult<T>;
}

impl<T> Context<T> for gridntl_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> AppResult<T> {
        self.map_err(|source| AppError::Core { context: what(), source })
    }
}
