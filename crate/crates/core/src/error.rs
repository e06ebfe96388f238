use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A window with (near) zero variance under the strict flat-window policy.
    #[error("window at offset {offset} is flat (std {std:e}) and the strict policy is active")]
    DegenerateWindow { offset: usize, std: f64 },

    #[error(
        "materializing {windows}x{windows} distances needs {required} bytes, over the budget of \
         {budget} bytes; use the on-demand distance policy"
    )]
    Capacity {
        windows: usize,
        required: u128,
        budget: u128,
    },

    #[error("cannot place {k} mutually non-overlapping windows: at most {available} fit")]
    Feasibility { k: usize, available: usize },

    #[error("search refused: {what} is estimated at {estimated}, above the ceiling of {ceiling}")]
    Resource {
        what: &'static str,
        estimated: u128,
        ceiling: u128,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable identifier, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::DegenerateWindow { .. } => "degenerate-window",
            Error::Capacity { .. } => "capacity",
            Error::Feasibility { .. } => "feasibility",
            Error::Resource { .. } => "resource",
            Error::Contract(_) => "contract",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::DegenerateWindow { .. } | Error::Contract(_) => 2,
            Error::Feasibility { .. } => 3,
            Error::Capacity { .. } | Error::Resource { .. } => 4,
            Error::Parse { .. } | Error::Io { .. } => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
