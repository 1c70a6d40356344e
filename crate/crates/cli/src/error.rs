//! CLI error type mapped onto process exit codes.

use std::fmt;

/// Errors surfaced by the command layer.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
/// 3 verification failure.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, invalid parameter combinations.
    Usage(String),
    /// Filesystem or file-format trouble.
    Io(String),
    /// A theorem verification check failed.
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Verification(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<l0recov_core::CoreError> for CliError {
    fn from(e: l0recov_core::CoreError) -> Self {
        CliError::Usage(e.to_string())
    }
}
