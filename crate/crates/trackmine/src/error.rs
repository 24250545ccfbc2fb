use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

/// Where in a file a problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line number.
    Line(u64),
    /// Byte offset from the start of the file.
    Byte(u64),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Byte(n) => write!(f, "byte {n}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad flags or configuration.
    #[error("{0}")]
    Usage(String),
    #[error("{}: {}", path.display(), source)]
    Io { path: PathBuf, source: io::Error },
    #[error("{}{}: {}", path.display(), at.map(|a| format!(": {a}")).unwrap_or_default(), message)]
    Data {
        path: PathBuf,
        at: Option<Location>,
        message: String,
    },
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn data(path: &Path, at: Option<Location>, message: impl Into<String>) -> Self {
        Error::Data {
            path: path.to_path_buf(),
            at,
            message: message.into(),
        }
    }

    /// Process exit status: 1 for usage errors, 2 for anything wrong with the data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Io { .. } | Error::Data { .. } => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
