use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::agents::{assign_roles, roles_for_model, AgentConfig, Strategy};
use crate::env::{
    graded_observabilities, preset_fixed_2x2, preset_local_optima, preset_random, InstanceFile, RandomChannel,
    RewardModel, Variant,
};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::ActionSpace;

pub const CONFIG_FORMAT_VERSION: u32 = 1;

/// Where an experiment's reward model comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    /// The fixed 2x2 instance, optionally with other observabilities.
    Fixed2x2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observabilities: Option<Vec<f64>>,
    },
    /// Diagonal local optima; observabilities default to `[1, 0.5]` for two
    /// agents and `i / N` otherwise.
    LocalOptima {
        k: usize,
        agents: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observabilities: Option<Vec<f64>>,
    },
    /// Means drawn afresh for every run from the run's `instance` substream.
    Random { sizes: Vec<usize>, channel: RandomChannel },
    File { path: PathBuf },
    Model(InstanceFile),
}

impl InstanceSpec {
    /// Loads file references; everything else is returned unchanged.
    pub fn resolve(&self) -> Result<InstanceSpec> {
        match self {
            InstanceSpec::File { path } => Ok(InstanceSpec::Model(InstanceFile::load(path)?)),
            other => Ok(other.clone()),
        }
    }

    /// The model for one run. Only random instances use `run_root`.
    pub fn model(&self, run_root: &RngStream) -> Result<RewardModel> {
        match self {
            InstanceSpec::Fixed2x2 { observabilities } => {
                let base = preset_fixed_2x2().model;
                match observabilities {
                    None => Ok(base),
                    Some(ps) => RewardModel::masked_bernoulli(base.space().clone(), base.means().to_vec(), ps.clone()),
                }
            }
            InstanceSpec::LocalOptima {
                k,
                agents,
                observabilities,
            } => {
                let ps = observabilities.clone().unwrap_or_else(|| {
                    if *agents == 2 {
                        vec![1.0, 0.5]
                    } else {
                        graded_observabilities(*agents)
                    }
                });
                Ok(preset_local_optima(*k, *agents, ps)?.model)
            }
            InstanceSpec::Random { sizes, channel } => {
                let space = ActionSpace::new(sizes.clone())?;
                Ok(preset_random(&space, channel, &mut run_root.substream("instance"))?.model)
            }
            InstanceSpec::File { path } => InstanceFile::load(path)?.to_model(),
            InstanceSpec::Model(file) => file.to_model(),
        }
    }

    pub fn agents(&self) -> Result<usize> {
        Ok(match self {
            InstanceSpec::Fixed2x2 { .. } => 2,
            InstanceSpec::LocalOptima { agents, .. } => *agents,
            InstanceSpec::Random { sizes, .. } => sizes.len(),
            InstanceSpec::File { path } => InstanceFile::load(path)?.shape.len(),
            InstanceSpec::Model(file) => file.shape.len(),
        })
    }
}

/// How seats are ordered into the partner-aware hierarchy.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleAssignment {
    /// By observation quality: descending p, or ascending noise for Gaussian.
    #[default]
    Observability,
    /// Uniformly random per run, as when observabilities are unknown.
    Random,
    /// Seats listed from highest to lowest rank.
    Explicit(Vec<usize>),
}

impl RoleAssignment {
    pub fn ranking(&self, model: &RewardModel, run_root: &RngStream) -> Result<Vec<usize>> {
        let n = model.space().agents();
        match self {
            RoleAssignment::Observability => Ok(roles_for_model(model)),
            RoleAssignment::Random if n < 2 => Ok(vec![0]),
            RoleAssignment::Random => assign_roles(&vec![None; n], &mut run_root.substream("roles")),
            RoleAssignment::Explicit(order) => Ok(order.clone()),
        }
    }
}

/// A substitute strategy that controls `seat` for the first `steps` steps.
/// The seat's configured agent observes those steps and keeps what it learns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub steps: u64,
    pub seat: usize,
    pub substitute: AgentConfig,
}

fn default_version() -> u32 {
    CONFIG_FORMAT_VERSION
}

fn default_runs() -> usize {
    1
}

/// One experiment: an instance, one agent per seat, a horizon and a batch size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub v: u32,
    pub instance: InstanceSpec,
    pub agents: Vec<AgentConfig>,
    /// Total steps per run, warm-start steps included.
    pub horizon: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub roles: RoleAssignment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<WarmStart>,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSpec, agents: Vec<AgentConfig>, horizon: u64) -> Self {
        Self {
            v: CONFIG_FORMAT_VERSION,
            instance,
            agents,
            horizon,
            runs: 1,
            seed: 0,
            roles: RoleAssignment::Observability,
            warm_start: None,
        }
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    /// Checks that do not depend on the drawn instance.
    pub fn validate(&self) -> Result<()> {
        if self.v != CONFIG_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.v));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        if self.runs == 0 {
            return Err(Error::invalid("run count must be at least 1"));
        }
        let n = self.instance.agents()?;
        if self.agents.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: self.agents.len(),
            });
        }
        for agent in &self.agents {
            agent.validate()?;
        }
        if let Some(warm) = &self.warm_start {
            if warm.steps >= self.horizon {
                return Err(Error::invalid(format!(
                    "warm start of {} steps leaves nothing of a {}-step horizon",
                    warm.steps, self.horizon
                )));
            }
            if warm.seat >= n {
                return Err(Error::invalid(format!("warm-start seat {} outside a team of {n}", warm.seat)));
            }
            warm.substitute.validate()?;
        }
        for (seat, agent) in self.agents.iter().enumerate() {
            if agent.strategy == Strategy::Scripted {
                let own_steps = self.horizon - self.warm_steps_for(seat);
                if (agent.script.len() as u64) < own_steps {
                    return Err(Error::invalid(format!(
                        "script for seat {seat} has {} actions but the seat plays {own_steps} steps",
                        agent.script.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn warm_steps_for(&self, seat: usize) -> u64 {
        match &self.warm_start {
            Some(w) if w.seat == seat => w.steps,
            _ => 0,
        }
    }
}

/// Bayesian strategies model Bernoulli rewards read through a 0-mask only.
pub(crate) fn check_compatibility<'a>(
    model: &RewardModel,
    strategies: impl IntoIterator<Item = &'a AgentConfig>,
) -> Result<()> {
    for agent in strategies {
        if agent.strategy.is_bayesian() && model.variant() != Variant::MaskedBernoulli {
            return Err(Error::Incompatible(format!(
                "{:?} needs the masked Bernoulli model, not {:?}",
                agent.strategy,
                model.variant()
            )));
        }
    }
    Ok(())
}
