use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] homsense_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 invalid configuration, 3 runtime or numeric failure, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        use homsense_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Json(_) => 3,
            CliError::Core(e) => match e {
                E::InvalidParameter(_) | E::Resolution(_) => 2,
                E::Parse { .. } | E::Io { .. } => 4,
                E::NoData | E::OutOfModel { .. } | E::Numeric { .. } => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
