use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition (Hermiticity, dimension, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// A function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Quadrature, integration or decomposition failed to reach tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A scenario or generator description is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
