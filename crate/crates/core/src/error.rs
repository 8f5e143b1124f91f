use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// A field violates a data-model invariant. `field` is a path such as
    /// `links[0][0].u`.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("master {master}: total load {total} is below the task size {required}")]
    InsufficientLoad {
        master: usize,
        total: f64,
        required: f64,
    },

    #[error("problem too large: {0}")]
    ScaleGuard(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
