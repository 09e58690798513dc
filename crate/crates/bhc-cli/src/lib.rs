//! Configuration, experiment runners and result emission behind the
//! `bhc-lab` binary.

mod config;
mod run;

pub use config::{Experiment, ExperimentConfig, OutputConfig, Slack, WindowConfig};
pub use run::{budget_from_env, run, Outcome, Summary, CLI_DEFAULT_BUDGET, GABOR_TOL, NON_DECAY_FRACTION};
