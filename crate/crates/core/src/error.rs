//! Crate error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Config or input validation failure. `path` names the offending
    /// field in dotted form (e.g. `grid.N`); maps to exit code 2.
    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    /// Contract violation on an operation input.
    #[error("invalid input to {op}: {msg}")]
    InvalidInput { op: &'static str, msg: String },

    /// Numerical failure (NaN, diagnostic cap, shooting bracket, ...);
    /// maps to exit code 3.
    #[error("numerical abort in {what}: {msg}")]
    Numerical { what: &'static str, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { path: path.into(), msg: msg.into() }
    }

    pub fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidInput { op, msg: msg.into() }
    }

    pub fn numerical(what: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerical { what, msg: msg.into() }
    }

    /// Process exit code for the CLI (schema errors 2, numerical aborts 3).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidInput { .. } => 2,
            Error::Numerical { .. } | Error::Io(_) => 3,
        }
    }
}
