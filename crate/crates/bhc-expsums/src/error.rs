use bhc_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpSumError {
    #[error("domain: {0}")]
    Domain(String),
    #[error("invalid-fewnomial: {0}")]
    InvalidFewnomial(String),
    #[error("am-parity: am = {0} must be even and positive")]
    AmParity(u32),
    #[error("exponent: a = {0} is excluded")]
    Exponent(f64),
    #[error("samples: {0}")]
    Samples(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}
