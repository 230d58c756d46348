use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode PNG {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported PNG {property}: {value} (expected 8-bit grayscale or RGB)")]
    UnsupportedPng { property: &'static str, value: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The input carries no signal beyond its constant component.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("training diverged at step {step} ({config}): loss = {loss}")]
    Diverged {
        step: usize,
        config: String,
        loss: f64,
    },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
