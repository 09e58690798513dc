//! End-to-end numerical experiments built on the lower crates: decay of the
//! single-scale form Λ̄, its uniform/clustered split, the absolute-value
//! model counterexample, stationary-phase convergence of the multiplier and
//! domination of the scale pieces by the bilinear maximal function.

mod counterexample;
mod decay;
mod dominate;
mod error;
mod lambda_bar;
mod stationary;

pub use counterexample::{
    abs_model_form, build_counterexample, full_ratio, i_term_check, progression_classes, CounterexampleInstance, ITermReport,
    LambdaClass, DEFAULT_A, DEFAULT_STRIDE, I_TERM_CONSTANT, I_TERM_FRACTION,
};
pub use decay::{fit_slope, fmt17, DecayReport};
pub use dominate::{
    domination_sweep, dyadic_radii, DominationReport, DominationRow, DOMINATE_BANDWIDTH, DOMINATE_GRID, DOMINATE_LAMBDA_BAND,
    MAX_FLOOR,
};
pub use error::ExperimentError;
pub use lambda_bar::{
    cell_window, decay_instance, decay_sweep, input_cells, lambda_bar, lambda_bar_clustered, lambda_bar_grid,
    lambda_bar_masked, random_band_function, random_stopping_time, split_uniform_clustered, CellSplit, DecaySweep,
    DESK_LAMBDA_BAND, F_BAND, GRID_HALF_WIDTH, G_BAND, PTS_PER_CYCLE, X_NODES_PER_CELL,
};
pub use stationary::{
    nonstationary_sup, stationary_phase_sweep, stationary_sample, KappaMode, StationaryReport, LAMBDA_PRIMES,
    NONSTATIONARY_POINTS, STATIONARY_POINTS, TARGET_SLOPE,
};

pub type Result<T> = std::result::Result<T, ExperimentError>;
