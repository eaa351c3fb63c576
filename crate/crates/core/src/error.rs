use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric precondition of a calculation was violated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema error in {path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A calculation failed for one state/pathway combination.
    #[error("{state}/{pathway}: {source}")]
    Computation {
        state: String,
        pathway: String,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Computation,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::Computation { .. } => ErrorKind::Computation,
            Error::MissingColumn { .. }
            | Error::Validation(_)
            | Error::Parse { .. }
            | Error::Io { .. } => ErrorKind::Input,
        }
    }

    pub(crate) fn in_context(self, state: &str, pathway: &str) -> Error {
        Error::Computation {
            state: state.to_owned(),
            pathway: pathway.to_owned(),
            source: Box::new(self),
        }
    }
}
