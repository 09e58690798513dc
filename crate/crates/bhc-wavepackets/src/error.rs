use bhc_core::CoreError;
use bhc_operators::OpError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WpError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("index-out-of-range: {0}")]
    IndexOutOfRange(String),
    #[error("range-mismatch: coefficient table and dual frame cover different indices")]
    RangeMismatch,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
