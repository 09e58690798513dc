//! Direct realizations of the bilinear Hilbert–Carleson operator `BC^a`,
//! its low-oscillation part `T₀`, the scale pieces `T_{m,k}`, the exact
//! multiplier `𝔐_{m,k}`, its stationary-phase main term and the dominating
//! maximal functions.

mod error;
mod maximal;
mod multiplier;
mod ops;
mod params;

pub use error::OpError;
pub use maximal::{bilinear_max, maximal_truncated_bht, theta_cutoff};
pub use multiplier::{
    c_a, multiplier_exact, multiplier_main, multiplier_stationary, stationary_amplitude, t_mk_model,
    FRESNEL_PHASE,
};
pub use ops::{bc_a, chi_low, t0, t_mk};
pub use params::{piecewise_constant_lambda, OperatorParams, PowerBranch};

pub type Result<T> = std::result::Result<T, OpError>;
