use serde::{Deserialize, Serialize};

use super::batch::run_batch;
use super::config::{ExperimentConfig, InstanceSpec};
use super::export::{ResultSet, Series};
use crate::agents::{AgentConfig, Strategy};
use crate::env::{FlipMode, RandomChannel, DEFAULT_C};
use crate::error::{Error, Result};

/// Every reproducible figure, in canonical spelling.
pub const FIGURES: [&str; 12] = [
    "l_sweep",
    "w_sweep",
    "algo_comparison_fixed",
    "algo_comparison_random",
    "p1_sweep",
    "p2_sweep",
    "action_count_sweep",
    "n_agents_sweep",
    "flipped",
    "gaussian",
    "kg_w_sweep",
    "very_naive_comparison",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub runs: usize,
    pub horizon: u64,
    pub seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            runs: 100,
            horizon: 10_000,
            seed: 0,
        }
    }
}

const L_VALUES: [usize; 4] = [1, 2, 3, 4];
const W_VALUES: [usize; 4] = [1, 5, 25, 50];
const KG_W_VALUES: [usize; 3] = [1, 5, 25];

fn fixed() -> InstanceSpec {
    InstanceSpec::Fixed2x2 { observabilities: None }
}

fn random_2x2(channel: RandomChannel) -> InstanceSpec {
    InstanceSpec::Random {
        sizes: vec![2, 2],
        channel,
    }
}

fn pa_pair(c: f64, repeat: usize, window: usize) -> Vec<AgentConfig> {
    vec![AgentConfig::pa_leader(c, repeat), AgentConfig::pa_follower(c, window)]
}

/// One `pa_rank_k` agent per seat; ranks come from the observabilities.
pub fn pa_team(agents: usize, c: f64, repeat: usize, window: usize) -> Vec<AgentConfig> {
    vec![AgentConfig::pa_rank_k(c, window, repeat); agents]
}

fn pair(strategy: Strategy) -> Vec<AgentConfig> {
    vec![AgentConfig::new(strategy); 2]
}

/// Experiments behind a figure, as labelled configs.
pub fn figure_configs(name: &str, opts: FigureOptions) -> Result<Vec<(String, ExperimentConfig)>> {
    let key = name.to_ascii_lowercase();
    let exp = |instance: InstanceSpec, agents: Vec<AgentConfig>| {
        ExperimentConfig::new(instance, agents, opts.horizon)
            .with_runs(opts.runs)
            .with_seed(opts.seed)
    };
    let comparison = |instance: InstanceSpec| {
        vec![
            ("pa_ucb".to_string(), exp(instance.clone(), pa_pair(DEFAULT_C, 1, 25))),
            ("naive_ucb".to_string(), exp(instance.clone(), pair(Strategy::NaiveUcb))),
            ("naive_thompson".to_string(), exp(instance, pair(Strategy::NaiveThompson))),
        ]
    };
    let pa_vs_naive = |instance: InstanceSpec| {
        vec![
            ("pa_ucb".to_string(), exp(instance.clone(), pa_pair(DEFAULT_C, 1, 25))),
            ("naive_ucb".to_string(), exp(instance, pair(Strategy::NaiveUcb))),
        ]
    };
    let configs = match key.as_str() {
        "l_sweep" => L_VALUES
            .iter()
            .map(|&l| (format!("L={l}"), exp(fixed(), pa_pair(DEFAULT_C, l, 1))))
            .collect(),
        "w_sweep" => W_VALUES
            .iter()
            .map(|&w| (format!("W={w}"), exp(fixed(), pa_pair(DEFAULT_C, 1, w))))
            .collect(),
        "algo_comparison_fixed" => comparison(fixed()),
        "algo_comparison_random" => comparison(random_2x2(RandomChannel::MaskedBernoulli {
            observabilities: vec![1.0, 0.5],
        })),
        "p1_sweep" => [0.6, 0.8, 1.0]
            .iter()
            .map(|&p| {
                let instance = InstanceSpec::Fixed2x2 {
                    observabilities: Some(vec![p, 0.5]),
                };
                (format!("p1={p}"), exp(instance, pa_pair(DEFAULT_C, 1, 25)))
            })
            .collect(),
        "p2_sweep" => [0.2, 0.5, 0.8]
            .iter()
            .map(|&p| {
                let instance = InstanceSpec::Fixed2x2 {
                    observabilities: Some(vec![1.0, p]),
                };
                (format!("p2={p}"), exp(instance, pa_pair(DEFAULT_C, 1, 25)))
            })
            .collect(),
        "action_count_sweep" => {
            let mut out: Vec<(String, ExperimentConfig)> = [2, 3, 4]
                .iter()
                .map(|&k| {
                    let instance = InstanceSpec::LocalOptima {
                        k,
                        agents: 2,
                        observabilities: None,
                    };
                    (format!("K={k}"), exp(instance, pa_pair(DEFAULT_C, 1, 25)))
                })
                .collect();
            let instance = InstanceSpec::Random {
                sizes: vec![30, 30],
                channel: RandomChannel::MaskedBernoulli {
                    observabilities: vec![1.0, 0.5],
                },
            };
            out.push(("K=30".into(), exp(instance, pa_pair(DEFAULT_C, 1, 25))));
            out
        }
        "n_agents_sweep" => [2, 3, 4]
            .iter()
            .map(|&n| {
                let instance = InstanceSpec::LocalOptima {
                    k: 2,
                    agents: n,
                    observabilities: Some(crate::env::graded_observabilities(n)),
                };
                (format!("N={n}"), exp(instance, pa_team(n, DEFAULT_C, 1, 25)))
            })
            .collect(),
        "flipped" => pa_vs_naive(random_2x2(RandomChannel::Flipped {
            observabilities: vec![1.0, 0.5],
            flip_mode: FlipMode::MissReadsOne,
        })),
        "gaussian" => pa_vs_naive(random_2x2(RandomChannel::Gaussian {
            noise_stds: vec![0.1, 0.5],
        })),
        "kg_w_sweep" => KG_W_VALUES
            .iter()
            .map(|&w| {
                let agents = vec![AgentConfig::new(Strategy::KgLeader), AgentConfig::pa_follower(DEFAULT_C, w)];
                (format!("W={w}"), exp(fixed(), agents))
            })
            .collect(),
        "very_naive_comparison" => {
            let long = |agents| {
                let mut c = exp(fixed(), agents);
                c.horizon = opts.horizon * 5;
                c
            };
            vec![
                ("pa_ucb".to_string(), long(pa_pair(DEFAULT_C, 1, 25))),
                ("very_naive_ucb".to_string(), long(pair(Strategy::VeryNaiveUcb))),
            ]
        }
        _ => return Err(Error::UnknownFigure(name.to_string())),
    };
    Ok(configs)
}

/// Runs every batch of a figure.
pub fn reproduce_figure(name: &str, opts: FigureOptions) -> Result<ResultSet> {
    let configs = figure_configs(name, opts)?;
    let series = configs
        .into_iter()
        .map(|(label, config)| {
            let batch = run_batch(&config)?;
            Ok(Series {
                label,
                config: Some(config),
                aggregate: batch.aggregate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultSet::new(name.to_ascii_lowercase(), series))
}
