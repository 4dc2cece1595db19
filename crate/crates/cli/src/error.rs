use std::path::PathBuf;

use crjoin_core::{Error, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A term or chain document that does not parse; `line` is 1-based in
    /// the document.
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Link { line: usize, source: Error },
    #[error("malformed certificate: {0}")]
    Certificate(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    /// Replays, bound checks or harness properties that failed.
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn syntax(line_offset: usize, e: ParseError) -> Self {
        CliError::Syntax {
            line: line_offset + e.line,
            column: e.column,
            message: e.message,
        }
    }

    /// `1` for failed checks, `3` for resource caps, `2` for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Core(Error::Replay(_)) => 1,
            CliError::Core(e) | CliError::Link { source: e, .. } if e.is_resource_cap() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
