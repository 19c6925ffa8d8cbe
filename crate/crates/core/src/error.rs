use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A row of an input file could not be decoded.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Input decoded fine but violates a domain rule.
    #[error("validation error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Validation { line: Option<u64>, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need at least {needed}, got {given}")]
    InsufficientData { needed: usize, given: usize },

    #[error("zero variance in input")]
    ZeroVariance,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u64, expected: u64 },

    #[error("malformed file: {0}")]
    Malformed(String),

    #[error("unknown storm id `{id}`; available: {}", available.join(", "))]
    UnknownStorm { id: String, available: Vec<String> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation {
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
