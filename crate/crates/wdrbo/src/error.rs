//! Error types shared across the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument was structurally invalid (dimension
    /// mismatch, empty input, out-of-range index, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A floating-point computation left its valid regime (Cholesky
    /// breakdown, negative variance beyond tolerance, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Configuration rejected during validation; `path` is the JSON field path.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// Filesystem failure, annotated with the offending path.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
