//! Error type shared across the crate.

use thiserror::Error;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type.
///
/// Variants map onto the process exit codes used by the CLI:
/// parameter/usage problems exit with 1, file-format problems with 2 and
/// numerical failures with 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: String,
    },

    /// A requested frame or index does not fit inside the signal.
    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    /// A text annotation file failed to parse; `line` is 1-based.
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    /// An audio file has an unsupported layout or encoding.
    #[error("unsupported audio format in {path}: {reason}")]
    Format { path: String, reason: String },

    /// An iterative or floating-point computation failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("wav: {0}")]
    Wav(#[from] hound::Error),
}

impl Error {
    /// Helper for the frequent invalid-parameter case.
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code the CLI uses for this error.
    ///
    /// 1 = usage / invalid parameters, 2 = input format, 3 = numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam { .. } | Error::OutOfBounds(_) => 1,
            Error::Parse { .. } | Error::Format { .. } | Error::Io(_) | Error::Wav(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}
