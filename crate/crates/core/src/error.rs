use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A process or run configuration violates its invariants.
    #[error("configuration error: {0}")]
    Config(String),

    /// The estimator has nothing to work with (no exceedances, empty
    /// conditioning set, degenerate sample).
    #[error("undefined result: {0}")]
    Undefined(String),

    /// A numerically evaluated quantity is unusable: a limit that did not
    /// settle on its grid, or a variance that came out nonpositive.
    #[error("numeric failure: {0}")]
    NumericLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }
}
