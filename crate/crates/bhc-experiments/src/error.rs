use bhc_core::CoreError;
use bhc_operators::OpError;
use bhc_wavepackets::WpError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Wp(#[from] WpError),
}

impl ExperimentError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}
