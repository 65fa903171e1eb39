//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration, rejected before any computation starts.
    #[error("config error: {0}")]
    Config(String),

    /// Linear solve failure for one species at one time level.
    #[error("solver error for species {species} at t = {time}: {message}")]
    Solver {
        species: usize,
        time: f64,
        message: String,
    },

    /// A computed field stopped being finite (blow-up or NaN).
    #[error("divergence for species {species} at t = {time}: {message}")]
    Divergence {
        species: usize,
        time: f64,
        message: String,
    },

    /// Filesystem failure, tagged with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
