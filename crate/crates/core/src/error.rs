use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Divergence { epoch: usize },

    #[error("class {0} is absent from the training fold")]
    MissingClass(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: String,
        #[source]
        source: Box<Error>,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::Config(_)
            | Error::Format(_)
            | Error::Json(_) => true,
            Error::Fold { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
