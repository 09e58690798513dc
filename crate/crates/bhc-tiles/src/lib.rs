//! Tri-tiles, sub-tiles, trees, and the size / energy machinery used to
//! check the multi-scale inequalities numerically.

mod error;
mod family;
mod hcoeff;
mod size_energy;
mod tile;
mod tree;

pub use error::TileError;
pub use family::{is_scale_sparse, random_collection, spatial_intervals, split_sparse};
pub use hcoeff::{
    cutoff, h_star, local_l2, local_l2_sup, localized_h_coeffs, psi_packet, tile_coefficient, HClass, LocalizedHCoeff,
    CUTOFF_DECAY,
};
pub use size_energy::{check_size_energy, energy_j, energy_j_with, size_j, SizeEnergyReport, WeightedTile, TOP_LEVELS};
pub use tile::{enumerate_subtiles, interiors_meet, make_tri_tile, Dyadic, DyadicInterval, SubTile, TileJson, TriTile};
pub use tree::{admits, lacunary_dilation, strongly_disjoint, top_component, DisjointnessRule, Tree, TreeJson, TreeKind};

pub type Result<T> = std::result::Result<T, TileError>;
