use bhc_core::CoreError;
use bhc_wavepackets::WpError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TileError {
    #[error("am-parity: am = {0} must be even and positive")]
    AmParity(u32),
    #[error("direction-mismatch: {0}")]
    DirectionMismatch(String),
    #[error("not-a-tree: {0}")]
    NotATree(String),
    #[error("theta: {0}")]
    Theta(String),
    #[error("classification-mismatch: {0}")]
    ClassificationMismatch(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Wp(#[from] WpError),
}
