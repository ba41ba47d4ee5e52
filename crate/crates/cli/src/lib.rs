//! Config ingestion, command dispatch and CSV/JSON export for floqdyn.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, Result};
