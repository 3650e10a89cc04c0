//! Seeded experiment batches.
//!
//! [`run_episode`] plays one run of an [`ExperimentConfig`]; [`run_batch`]
//! plays all runs in parallel and aggregates their pseudo-regret curves.
//! Run `i` of a batch is seeded with [`run_seed`](crate::run_seed)`(seed, i)`,
//! so the config and base seed fix every number a batch produces.

mod batch;
mod config;
mod episode;
mod export;
mod figures;
mod regret;

pub use batch::{run_batch, run_curve, run_traces, theorem_mode_config, verify_theorem, BatchResult, TheoremCheck};
pub use config::{ExperimentConfig, InstanceSpec, RoleAssignment, WarmStart, CONFIG_FORMAT_VERSION};
pub use episode::{prepare_episode, run_episode, Commitment, Episode, RunTrace, StepRecord};
pub use export::{Format, ResultSet, Series, RESULT_FORMAT_VERSION};
pub use figures::{figure_configs, pa_team, reproduce_figure, FigureOptions, FIGURES};
pub use regret::{
    aggregate, pseudo_regret, pseudo_regret_steps, sublinearity_metrics, theorem1_bound, Aggregate, Sublinearity,
};
