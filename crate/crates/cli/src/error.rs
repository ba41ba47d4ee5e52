use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] floqdyn_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    /// 3 for numerical failures, 2 for everything the user can fix in the
    /// input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(floqdyn_core::Error::Numerical(_)) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}
