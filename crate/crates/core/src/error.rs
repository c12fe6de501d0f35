use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("duplicate primary keys in partition input: {0:?}")]
    DuplicateKeys(Vec<String>),

    #[error("record failed validation: {0}")]
    Validation(String),

    #[error("no publication date known for paper {0}; ingest it before summarizing")]
    UnknownPaper(String),

    #[error("summaries without a matching paper record: {0:?}")]
    OrphanSummaries(Vec<String>),

    #[error("unknown topic: {0}")]
    UnknownTopic(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("provider error: {0}")]
    Provider(String),

    #[error("no consolidation stored for {0}; run `paperbrew monthly --month {0}` first")]
    MissingConsolidation(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
