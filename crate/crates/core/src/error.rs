use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty plane")]
    EmptyPlane,

    #[error("dimension not divisible by factor: {height}x{width} by {factor}")]
    NotDivisible {
        height: usize,
        width: usize,
        factor: usize,
    },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("image too small: {height}x{width}, need at least {min}x{min}")]
    TooSmall {
        height: usize,
        width: usize,
        min: usize,
    },

    #[error("degenerate denominator")]
    DegenerateDenominator,

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("unexpected files in {}: missing [{}], extra [{}]", dir.display(), missing.join(", "), extra.join(", "))]
    DirectoryContents {
        dir: PathBuf,
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("inconsistent format in {}", .0.display())]
    InconsistentFormat(PathBuf),

    #[error("corrupt header in {}: {reason}", path.display())]
    CorruptHeader { path: PathBuf, reason: String },

    #[error("{}: expected {expected:?}, found {found:?}", path.display())]
    FileDimMismatch {
        path: PathBuf,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("non-finite sample in {0}")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors raised by the filesystem layer rather than by bad input.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::MissingFile(_)
                | Error::DirectoryContents { .. }
                | Error::InconsistentFormat(_)
                | Error::CorruptHeader { .. }
                | Error::FileDimMismatch { .. }
                | Error::Json { .. }
        )
    }
}
