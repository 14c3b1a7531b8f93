//! CLI error type with the exit-code contract:
//! 2 = configuration error, 3 = numeric failure, 4 = I/O failure.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Core(merton_core::Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
        /// Files already written before the failure.
        completed: Vec<PathBuf>,
    },
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Core(e) => match e {
                merton_core::Error::Quadrature { .. }
                | merton_core::Error::GridRefinement(_)
                | merton_core::Error::NonConvergence { .. } => 3,
                _ => 2,
            },
            AppError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(msg) => write!(f, "configuration error: {msg}"),
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io { path, source, completed } => {
                write!(f, "i/o failure on {}: {source}", path.display())?;
                if !completed.is_empty() {
                    let done: Vec<String> =
                        completed.iter().map(|p| p.display().to_string()).collect();
                    write!(f, " (completed files: {})", done.join(", "))?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for AppError {}

impl From<merton_core::Error> for AppError {
    fn from(e: merton_core::Error) -> Self {
        AppError::Core(e)
    }
}

pub type CliResult<T> = Result<T, AppError>;
