use std::io;
use std::path::PathBuf;

use oblivio_core::traffic::Violation;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Process exit status for success.
pub const EXIT_OK: u8 = 0;
/// Exit status for IO failures and failed verifications.
pub const EXIT_FAILURE: u8 = 1;
/// Exit status when a trace violates its adversary bound.
pub const EXIT_ADMISSIBILITY: u8 = 2;
/// Exit status for invalid parameters or malformed input files.
pub const EXIT_PARAMETER: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] oblivio_core::Error),
    #[error("{path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("{0}")]
    Parameter(String),
    #[error(
        "trace is not ({rho}, {b})-admissible: link {link} carries {load} packets in rounds {start}..{end}",
        link = .violation.link,
        load = .violation.load,
        start = .violation.window_start,
        end = .violation.window_start + .violation.window_len
    )]
    Admissibility { rho: String, b: u64, violation: Violation },
    #[error("{0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn param(msg: impl Into<String>) -> Self {
        CliError::Parameter(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Admissibility { .. } => EXIT_ADMISSIBILITY,
            CliError::Core(_) | CliError::Format { .. } | CliError::Parameter(_) => EXIT_PARAMETER,
            CliError::Verification(_) | CliError::Io { .. } => EXIT_FAILURE,
        }
    }
}
