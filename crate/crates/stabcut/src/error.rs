use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Input` covers malformed arguments and files, `Capacity` covers requests
/// beyond the configured enumeration / qudit bounds. These map to distinct
/// process exit codes in the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("undefined entropy: {0}")]
    UndefinedEntropy(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
