//! Problem instances used by the experiments.

use serde::{Deserialize, Serialize};

use super::model::{FlipMode, RewardModel, Variant};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::ActionSpace;

/// Exploration constant used by the simulation presets.
pub const DEFAULT_C: f64 = 0.025;

#[derive(Clone, Debug, PartialEq)]
pub struct InstancePreset {
    pub name: String,
    pub model: RewardModel,
    /// Default exploration constant for agents on this instance.
    pub default_c: f64,
    /// Generator seed for randomly drawn instances.
    pub seed: Option<u64>,
}

/// The 2x2 instance with a local optimum at (1, 1):
/// means (0,0)=0.8, (0,1)=0.4, (1,0)=0.2, (1,1)=0.6 and p = [1, 0.5].
pub fn preset_fixed_2x2() -> InstancePreset {
    let model = RewardModel::masked_bernoulli(
        ActionSpace::square(2, 2).expect("2x2"),
        vec![0.8, 0.4, 0.2, 0.6],
        vec![1.0, 0.5],
    )
    .expect("valid preset");
    InstancePreset {
        name: "fixed_2x2".into(),
        model,
        default_c: DEFAULT_C,
        seed: None,
    }
}

/// K x K instance with K strict local optima on the diagonal.
pub fn preset_k_local_optima(k: usize) -> Result<InstancePreset> {
    preset_local_optima(k, 2, vec![1.0, 0.5])
}

/// `agents`-dimensional generalization of [`preset_k_local_optima`].
///
/// With `i` the first coordinate of a cell, the "diagonal" cell `(i, .., i)`
/// has mean `0.8 - 0.4 i / k` and every other cell `0.4 - 0.4 i / k`. Every
/// diagonal cell is a strict unilateral local optimum, the global optimum is
/// the all-zeros cell, and `k = 2, agents = 2` gives the fixed 2x2 means.
pub fn preset_local_optima(k: usize, agents: usize, observabilities: Vec<f64>) -> Result<InstancePreset> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 actions per agent, got {k}")));
    }
    if agents < 2 {
        return Err(Error::invalid("need at least 2 agents"));
    }
    let space = ActionSpace::square(k, agents)?;
    let kf = k as f64;
    let means = (0..space.total())
        .map(|flat| {
            let action = space.action(flat);
            let i = action.0[0];
            let shift = 0.4 * i as f64 / kf;
            if action.0.iter().all(|&c| c == i) {
                0.8 - shift
            } else {
                0.4 - shift
            }
        })
        .collect();
    let model = RewardModel::masked_bernoulli(space, means, observabilities)?;
    Ok(InstancePreset {
        name: format!("local_optima_k{k}_n{agents}"),
        model,
        default_c: DEFAULT_C,
        seed: None,
    })
}

/// Observabilities `p_i = i / N` for seats `1..=N`.
pub fn graded_observabilities(agents: usize) -> Vec<f64> {
    (1..=agents).map(|i| i as f64 / agents as f64).collect()
}

/// Observation channel of a randomly drawn instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum RandomChannel {
    MaskedBernoulli {
        observabilities: Vec<f64>,
    },
    Flipped {
        observabilities: Vec<f64>,
        #[serde(default)]
        flip_mode: FlipMode,
    },
    Gaussian {
        noise_stds: Vec<f64>,
    },
}

impl RandomChannel {
    pub fn variant(&self) -> Variant {
        match self {
            RandomChannel::MaskedBernoulli { .. } => Variant::MaskedBernoulli,
            RandomChannel::Flipped { .. } => Variant::Flipped,
            RandomChannel::Gaussian { .. } => Variant::Gaussian,
        }
    }
}

/// Means drawn i.i.d. Uniform[0, 1]; Gaussian true stds Uniform[0.1, 0.5].
/// An instance whose optimum is tied is discarded and redrawn from the same
/// stream.
pub fn preset_random(shape: &ActionSpace, channel: &RandomChannel, rng: &mut RngStream) -> Result<InstancePreset> {
    let seed = rng.key();
    loop {
        let means: Vec<f64> = (0..shape.total()).map(|_| rng.uniform()).collect();
        let model = match channel {
            RandomChannel::MaskedBernoulli { observabilities } => {
                RewardModel::masked_bernoulli(shape.clone(), means, observabilities.clone())?
            }
            RandomChannel::Flipped {
                observabilities,
                flip_mode,
            } => RewardModel::flipped(shape.clone(), means, observabilities.clone(), *flip_mode)?,
            RandomChannel::Gaussian { noise_stds } => {
                let stds = (0..shape.total()).map(|_| rng.uniform_range(0.1, 0.5)).collect();
                RewardModel::gaussian(shape.clone(), means, stds, noise_stds.clone())?
            }
        };
        if !model.is_degenerate() {
            return Ok(InstancePreset {
                name: format!("random_{:?}", channel.variant()).to_lowercase(),
                model,
                default_c: DEFAULT_C,
                seed: Some(seed),
            });
        }
    }
}
