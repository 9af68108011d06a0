use std::path::PathBuf;

use crate::io::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("matrix is singular to working precision (pivot column {column})")]
    Singular { column: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed report: {0}")]
    Report(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
