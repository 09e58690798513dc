use bhc_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl OpError {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Self::InvalidParams(msg.into())
    }
}
