use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("value {value} is outside the domain [0, {size})")]
    Domain { value: u64, size: u64 },
    #[error("identity {0} is already stored in this bin")]
    Duplicate(u64),
    #[error("capacity of {0} elements reached")]
    Capacity(u64),
    #[error("structural failure: {0}")]
    Structural(String),
    #[error("structure is in a failed state and must be rebuilt")]
    Failed,
    #[error("snapshot: {0}")]
    Snapshot(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn is_structural(&self) -> bool {
        matches!(self, Error::Structural(_) | Error::Failed)
    }
}
