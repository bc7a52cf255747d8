//! Command-line front end for `milne-core`.
//!
//! Every command returns an [`envelope::Envelope`]; `main` decides whether
//! to print it as CSV or JSON.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod envelope;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
