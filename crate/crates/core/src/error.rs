use std::path::PathBuf;

use thiserror::Error;

use crate::sentiment::SentimentLabel;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the pipeline.
///
/// Every variant maps onto one of the process exit classes through
/// [`Error::exit_code`]: configuration (1), data (2) or numerical (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(
        "corpus quality: {malformed} of {total} records malformed in {} (limit 10%)",
        path.display()
    )]
    CorpusQuality {
        path: PathBuf,
        malformed: usize,
        total: usize,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("invalid topic `{name}`: {reason}")]
    InvalidTopic { name: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("category {0} has no training samples")]
    EmptyCategory(SentimentLabel),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular design: column(s) {} are linearly dependent on earlier columns", columns.join(", "))]
    SingularDesign { columns: Vec<String> },

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("prediction and actual are both zero at index {0}")]
    ZeroPair(usize),

    #[error("missing predictor column `{0}`")]
    MissingColumn(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Tags the error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Process exit code: 1 usage/config, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::SingularDesign { .. } | Error::ZeroVariance(_) | Error::ZeroPair(_) => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
