//! Command-line front end: input files, command dispatch and reports.

pub mod commands;
pub mod input;
pub mod report;

pub use commands::{run, Command, RunConfig};
pub use input::{load_pair, load_system};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error at \"{pointer}\": {message}")]
    Schema { pointer: String, message: String },
    #[error("invariant violated at \"{pointer}\": {source}")]
    Invariant { pointer: String, source: dynsamp_core::Error },
    #[error("observation file: {0}")]
    Csv(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dynsamp_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_certificate_failure() => commands::EXIT_CERTIFICATE,
            _ => commands::EXIT_INPUT,
        }
    }
}
