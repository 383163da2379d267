use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("truncated {0}")]
    Truncated(&'static str),
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("invalid count: {0}")]
    InvalidCount(String),
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("image error: {0}")]
    Image(String),
    #[error("empty model")]
    EmptyModel,
    #[error("empty mesh")]
    EmptyMesh,
    #[error("masks have no overlapping pixels")]
    NoOverlap,
    #[error("no valid depth pairs")]
    NoValidPairs,
    #[error("ground-truth field has no occupied region")]
    EmptyOccupancy,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
