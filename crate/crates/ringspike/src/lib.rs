//! Files, parallel campaigns and the `ringspike` command line on top of
//! [`ringspike_core`].
//!
//! * [`formats`]: JSON profiles, Jordan data, basis matrices, experiment configs.
//! * [`output`]: outlier and matrix CSV, summary JSON, SVG scatter.
//! * [`parallel`]: a rayon executor for Monte-Carlo trials.
//! * [`cli`]: argument parsing and the seven subcommands.
//!
//! JSON schemas for every emitted document live in `schemas/`.

pub mod cli;
pub mod formats;
pub mod output;
pub mod parallel;

pub use ringspike_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad flags, unreadable inputs, invalid documents. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Failure while writing outputs. Exit code 2.
    #[error("i/o error: {0}")]
    Io(String),
    /// Numerical or experiment failure. Exit code 2.
    #[error(transparent)]
    Numerical(#[from] ringspike_core::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Io(_) | Self::Numerical(_) => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
