use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum SdofError {
    #[error("matrix is singular (rank {rank} < {size})")]
    SingularMatrix { rank: usize, size: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("resample limit of {limit} exceeded while sampling {what}")]
    ResampleLimitExceeded { what: &'static str, limit: usize },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("invalid rank request: {0}")]
    InvalidRank(String),

    #[error("malformed file: field `{field}`: {reason}")]
    MalformedFile { field: String, reason: String },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid power grid: {0}")]
    InvalidPowerGrid(String),

    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SdofError {
    pub(crate) fn malformed(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SdofError::MalformedFile {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn mismatch(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        SdofError::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T, E = SdofError> = std::result::Result<T, E>;
