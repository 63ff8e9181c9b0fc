use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A tabulated grid is too coarse for the scale it has to resolve.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("no usable detection events")]
    NoData,

    /// The observed statistics cannot be produced by the model; `boundary`
    /// is the nearest admissible estimate.
    #[error("observation outside the model ({reason}); boundary estimate {boundary}")]
    OutOfModel { reason: String, boundary: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Numeric { achieved: f64, requested: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
