use std::io;

/// Failures of a command, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad bounds or unreadable input files.
    #[error("usage: {0}")]
    Usage(String),
    /// A verification or solve that ran and failed.
    #[error("{0}")]
    Failure(String),
    #[error(transparent)]
    Core(#[from] foldtree::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("malformed JSON: {e}"))
    }
}
