use std::path::PathBuf;

use crate::trainer::EpochRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the toolkit.
///
/// Reader errors always carry a location: a byte offset for binary files,
/// a 1-based line number for text files.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("length error at byte offset {offset}: expected {expected} more bytes, found {found}")]
    Length {
        offset: u64,
        expected: u64,
        found: u64,
    },

    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("training diverged at epoch {epoch}: {message}")]
    Training {
        epoch: usize,
        message: String,
        history: Vec<EpochRecord>,
    },

    /// A decode error inside a named file.
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
