//! CLI error type carrying the process exit code.
//!
//! Exit code contract: 0 success, 2 configuration error (bad flags, bad
//! config file, incoherent parameters, invalid model inputs), 3 numerical
//! failure (non-convergence, degenerate data), 4 I/O error (unreadable,
//! unwritable, or malformed data files).

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or arguments (exit 2).
    Config(String),
    /// The computation itself failed (exit 3).
    Numerical(hwfr::Error),
    /// Reading or writing data failed (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> CliError {
        CliError::Io(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hwfr::Error> for CliError {
    fn from(e: hwfr::Error) -> CliError {
        // A failure deep inside one resampling replicate keeps its numerical
        // or configuration character; unwrap to classify, but report the
        // wrapped error (it names the replicate).
        fn is_numerical(e: &hwfr::Error) -> bool {
            match e {
                hwfr::Error::DidNotConverge { .. } | hwfr::Error::Degenerate(_) => true,
                hwfr::Error::Replicate { source, .. } => is_numerical(source),
                _ => false,
            }
        }
        if is_numerical(&e) {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
