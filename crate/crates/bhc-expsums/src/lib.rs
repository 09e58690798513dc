//! Fewnomial zero counts and level sets, exact Weyl sums over the windowed
//! `(p, q, r, v)` family, a discrete Van der Corput checker, and the greedy
//! tube decomposition of a linearizing function.

mod error;
mod fewnomial;
mod lambda;
mod phase;
mod report;
mod tubes;
mod vdc;
mod weyl;

pub use error::ExpSumError;
pub use fewnomial::{
    count_zeros, k_constant, level_set_measure, signed_pow, Fewnomial, LevelSetBoundKind, LevelSetReport, ZeroCount,
    LEVEL_SET_SAMPLES, PLATEAU_TOL, ROOT_TOL,
};
pub use lambda::LambdaTilde;
pub use phase::{
    phase_fewnomial, phase_levelset_bound, phase_levelset_measure, PhaseBound, PhaseCase, PhaseLevelSet, CANCEL_TOL,
    COVER_COUNT,
};
pub use report::ReportRow;
pub use tubes::{nx_check, tube_decompose, NxReport, Tube, TubeDecomposition, TubeGeometry, DEFAULT_C, DEFAULT_EPS, NX_SHRINK_LOG2};
pub use vdc::{dist_to_int, vdc_check, VdcReport, C_VDC, VDC_SAMPLES_PER_UNIT};
pub use weyl::{is_resonant, s_ladder, weyl_sum, weyl_sweep, WeylPhase, WeylReport, WeylSweep, WeylWindows, AFFINE_TOL};

pub type Result<T> = std::result::Result<T, ExpSumError>;
