use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("covariance error: {0}")]
    Covariance(String),

    #[error("ball membership error: {0}")]
    Membership(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: C({d}, {k}) = {count:.3e} > {budget:.0e}")]
    Enumeration {
        d: usize,
        k: usize,
        count: f64,
        budget: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("missing constant `{name}` required by {theorem}")]
    MissingConstant { theorem: String, name: String },

    #[error("experiment failure: {0}")]
    Experiment(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
