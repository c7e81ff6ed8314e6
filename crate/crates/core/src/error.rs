use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two families: malformed data (bad files, shape
/// mismatches, empty inputs) and invalid parameters. The CLI maps the first
/// family to exit code 1 and the second to exit code 2; see
/// [`Error::is_config_error`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty stream")]
    EmptyStream,

    #[error("stream {id:?}: {reason}")]
    InvalidStream { id: String, reason: String },

    #[error("timestamps required but stream {0:?} has none")]
    MissingTimestamps(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("signature order/dimension mismatch: ({d1}, {n1}) vs ({d2}, {n2})")]
    SignatureMismatch {
        d1: usize,
        n1: usize,
        d2: usize,
        n2: usize,
    },

    #[error("signature dimension overflows usize for d = {d}, N = {order}")]
    DimensionOverflow { d: usize, order: usize },

    #[error("letter {letter} outside alphabet 1..={dim}")]
    InvalidLetter { letter: usize, dim: usize },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("both classes must be present (normal: {normal}, anomalous: {anomalous})")]
    SingleClass { normal: usize, anomalous: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn invalid_stream(id: &str, reason: impl Into<String>) -> Self {
        Error::InvalidStream {
            id: id.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad parameters rather than bad data.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::DimensionOverflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
