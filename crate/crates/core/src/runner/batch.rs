use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InstanceSpec};
use super::episode::{prepare_episode, run_episode, RunTrace};
use super::regret::{aggregate, pseudo_regret, theorem1_bound, Aggregate};
use crate::agents::{AgentConfig, DeltaMode};
use crate::env::preset_fixed_2x2;
use crate::error::Result;
use crate::rng::run_seed;

/// Per-run curves of one batch plus their aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub seeds: Vec<u64>,
    pub curves: Vec<Vec<f64>>,
    pub aggregate: Aggregate,
}

/// Pseudo-regret curve of one run, without keeping the trace around.
pub fn run_curve(config: &ExperimentConfig, seed: u64) -> Result<Vec<f64>> {
    let mut episode = prepare_episode(config, seed)?;
    episode.run_to_end()?;
    let model = episode.model().clone();
    pseudo_regret(&episode.into_trace(seed), &model)
}

/// All runs of `config`, in parallel. Run `i` uses seed `run_seed(config.seed, i)`;
/// results are collected in run order, so the output does not depend on
/// scheduling.
pub fn run_batch(config: &ExperimentConfig) -> Result<BatchResult> {
    config.validate()?;
    let config = ExperimentConfig {
        instance: config.instance.resolve()?,
        ..config.clone()
    };
    let seeds: Vec<u64> = (0..config.runs as u64).map(|i| run_seed(config.seed, i)).collect();
    let curves = seeds
        .par_iter()
        .map(|&s| run_curve(&config, s))
        .collect::<Result<Vec<_>>>()?;
    let aggregate = aggregate(&curves)?;
    Ok(BatchResult {
        seeds,
        curves,
        aggregate,
    })
}

/// Traces of every run, for inspection and export.
pub fn run_traces(config: &ExperimentConfig) -> Result<Vec<RunTrace>> {
    (0..config.runs as u64)
        .into_par_iter()
        .map(|i| run_episode(config, run_seed(config.seed, i)))
        .collect()
}

/// The configuration the regret bound is proven for: fixed 2x2 instance,
/// `c = 2`, `delta = 1/T^2`, leader repetition 2 and window 1.
pub fn theorem_mode_config(horizon: u64, runs: usize, seed: u64) -> ExperimentConfig {
    let mut leader = AgentConfig::pa_leader(2.0, 2);
    let mut follower = AgentConfig::pa_follower(2.0, 1);
    leader.delta = DeltaMode::Horizon;
    follower.delta = DeltaMode::Horizon;
    ExperimentConfig::new(InstanceSpec::Fixed2x2 { observabilities: None }, vec![leader, follower], horizon)
        .with_runs(runs)
        .with_seed(seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub horizon: u64,
    pub runs: usize,
    pub mean_regret: f64,
    pub stderr: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Runs the theorem-mode batch and compares its mean final regret with the bound.
pub fn verify_theorem(horizon: u64, runs: usize, seed: u64) -> Result<TheoremCheck> {
    let batch = run_batch(&theorem_mode_config(horizon, runs, seed))?;
    let bound = theorem1_bound(&preset_fixed_2x2().model, horizon, false)?;
    let mean_regret = batch.aggregate.final_mean();
    Ok(TheoremCheck {
        horizon,
        runs,
        mean_regret,
        stderr: batch.aggregate.stderr.last().copied().unwrap_or(0.0),
        bound,
        holds: mean_regret <= bound,
    })
}
