//! Gabor wave-packets at scale `2^{am/2-k}`, the oscillatory weight `w^e`
//! with its majorant, the discrete model blocks `S^{n,v,p}`, their
//! continuous counterparts `S̃` and the light/uniform/clustered index split.

mod classify;
mod error;
mod gabor;
mod geometry;
mod model;
mod packets;
mod weight;

pub use classify::{classify_indices, light_mass, localized_part, Classification, ClassifyParams, Triple};
pub use error::WpError;
pub use gabor::{gabor_coeffs, gabor_reconstruct, CoefficientTable, DualFrame, TIKHONOV_FLOOR};
pub use geometry::{ModelGeometry, Windows, DEFAULT_WINDOW_C};
pub use model::{continuous_s_tilde, s_tilde_at, transition_rhs, transition_rhs_radii, trilinear_form, ModelCoeffs, PlancherelReport};
pub use packets::{phi_check, PacketFrame, WavePacketIndex};
pub use weight::{cbar_a, critical_point_numeric, weight_majorant, weight_we, weighted_we, OscWeight};

pub type Result<T> = std::result::Result<T, WpError>;
