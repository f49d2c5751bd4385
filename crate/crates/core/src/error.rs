use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The caller passed something outside the operation's domain.
    #[error("invalid input: {0}")]
    Input(String),
    /// A desk-scale routine was asked to work on an instance larger than it supports.
    #[error("instance too large: {0}")]
    TooLarge(String),
    /// An internal consistency check failed. Usually means an oracle is not
    /// a matroid, or an objective is not submodular.
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
