use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis index n = {0} (indices start at 1)")]
    BasisIndex(usize),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("non-finite amplitude at step {step} (t = {time}); the time step is too large")]
    Instability { step: usize, time: f64 },

    #[error("undefined envelope slope: intensity at order {order} is not positive")]
    UndefinedSlope { order: usize },

    #[error("bad data: {0}")]
    Data(String),

    #[error("sweep {key} = {value}: {source}")]
    Member {
        key: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { key: key.into(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status for this error: 2 configuration, 3 instability, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Instability { .. } => 3,
            Error::Io { .. } => 4,
            Error::Member { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
