use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("input is not valid UTF-8: {0}")]
    Encoding(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("vocabulary hash mismatch: resource built for {found:016x}, corpus has {expected:016x}")]
    VocabMismatch { expected: u64, found: u64 },

    #[error("training failed: {0}")]
    Training(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("word not in vocabulary: {0}")]
    OutOfVocabulary(String),

    #[error("{}:{line}: {msg}", file.display())]
    WordNet {
        file: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("statistics error: {0}")]
    Stats(String),
}

impl Error {
    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }
}
