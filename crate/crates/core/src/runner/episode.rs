use serde::{Deserialize, Serialize};

use super::config::{check_compatibility, ExperimentConfig, WarmStart};
use crate::agents::{Agent, AgentConfig, AgentStreams, Prediction};
use crate::env::{InstanceFile, RewardModel};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::TeamAction;

/// Everything that happened on one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub team_action: TeamAction,
    pub true_reward: f64,
    /// Observed reward per seat.
    pub observed: Vec<f64>,
    /// Sampled partner predictions, per seat.
    pub predictions: Vec<Vec<Prediction>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub warm_start: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub seed: u64,
    pub ranking: Vec<usize>,
    pub model: InstanceFile,
    pub steps: Vec<StepRecord>,
}

/// Actions fixed for step `t` before any external action is read.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub t: u64,
    /// `None` for externally controlled seats.
    pub actions: Vec<Option<usize>>,
    pub predictions: Vec<Vec<Prediction>>,
}

/// Step engine for one run.
///
/// A step has two phases. [`Episode::commit`] asks every agent-controlled
/// seat for its action; [`Episode::resolve`] then takes the actions of
/// external seats, samples the reward and hands each agent the team action
/// and its own observation. No agent can see a step-t action before it has
/// committed its own.
#[derive(Clone, Debug)]
pub struct Episode {
    model: RewardModel,
    ranking: Vec<usize>,
    horizon: u64,
    seats: Vec<Option<Agent>>,
    warm: Option<(u64, usize, Agent)>,
    env: RngStream,
    records: Vec<StepRecord>,
}

impl Episode {
    /// `seats[i] = None` marks seat `i` as external (a human). Streams are
    /// derived from `root`: `env`, `agent/<seat>/..` and `warm/agent/<seat>/..`.
    pub fn new(
        model: RewardModel,
        seats: Vec<Option<AgentConfig>>,
        ranking: Vec<usize>,
        horizon: u64,
        warm_start: Option<&WarmStart>,
        root: &RngStream,
    ) -> Result<Self> {
        let space = model.space().clone();
        if seats.len() != space.agents() {
            return Err(Error::LengthMismatch {
                expected: space.agents(),
                found: seats.len(),
            });
        }
        if horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        check_compatibility(&model, seats.iter().flatten().chain(warm_start.map(|w| &w.substitute)))?;
        let agents = seats
            .into_iter()
            .enumerate()
            .map(|(seat, config)| {
                config
                    .map(|c| Agent::new(c, seat, &space, &ranking, horizon, AgentStreams::for_seat(root, seat)))
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()?;
        let warm = match warm_start {
            Some(w) if w.steps > 0 => {
                if w.steps >= horizon || w.seat >= space.agents() {
                    return Err(Error::invalid("warm start must fit inside the horizon"));
                }
                let streams = AgentStreams::for_seat(&root.substream("warm"), w.seat);
                let agent = Agent::new(w.substitute.clone(), w.seat, &space, &ranking, horizon, streams)?;
                Some((w.steps, w.seat, agent))
            }
            _ => None,
        };
        Ok(Self {
            model,
            ranking,
            horizon,
            seats: agents,
            warm,
            env: root.substream("env"),
            records: Vec::with_capacity(horizon.min(1 << 20) as usize),
        })
    }

    pub fn model(&self) -> &RewardModel {
        &self.model
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Completed steps.
    pub fn step(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn is_done(&self) -> bool {
        self.step() >= self.horizon
    }

    /// Whether the next step is played by the warm-start substitute.
    pub fn in_warm_start(&self) -> bool {
        matches!(self.warm, Some((steps, _, _)) if self.step() < steps)
    }

    pub fn warm_start_steps(&self) -> u64 {
        self.warm.as_ref().map_or(0, |w| w.0)
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn agent(&self, seat: usize) -> Option<&Agent> {
        self.seats.get(seat).and_then(Option::as_ref)
    }

    /// Seats that need an external action on the next step.
    pub fn external_seats(&self) -> Vec<usize> {
        let warm_seat = self.in_warm_start().then(|| self.warm.as_ref().map(|w| w.1)).flatten();
        (0..self.seats.len())
            .filter(|&s| self.seats[s].is_none() && Some(s) != warm_seat)
            .collect()
    }

    pub fn commit(&mut self) -> Result<Commitment> {
        if self.is_done() {
            return Err(Error::BudgetExhausted);
        }
        let t = self.step() + 1;
        let warm_seat = if self.in_warm_start() {
            self.warm.as_ref().map(|w| w.1)
        } else {
            None
        };
        let n = self.seats.len();
        let mut actions = vec![None; n];
        let mut predictions = vec![Vec::new(); n];
        for seat in 0..n {
            let agent = if Some(seat) == warm_seat {
                self.warm.as_mut().map(|w| &mut w.2)
            } else {
                self.seats[seat].as_mut()
            };
            if let Some(agent) = agent {
                let decision = agent.act(t)?;
                actions[seat] = Some(decision.action);
                predictions[seat] = decision.predictions;
            }
        }
        Ok(Commitment { t, actions, predictions })
    }

    /// Completes the committed step with `(seat, action)` pairs for every
    /// external seat. On error nothing changes and the commitment stays usable.
    pub fn resolve(&mut self, commitment: &Commitment, external: &[(usize, usize)]) -> Result<&StepRecord> {
        if commitment.t != self.step() + 1 {
            return Err(Error::StaleSequence {
                expected: self.step() + 1,
                got: commitment.t,
            });
        }
        let space = self.model.space();
        let mut coords = commitment.actions.clone();
        for &(seat, action) in external {
            if seat >= coords.len() || coords[seat].is_some() {
                return Err(Error::invalid(format!("seat {seat} is not waiting for an external action")));
            }
            if action >= space.size(seat) {
                return Err(Error::ActionOutOfRange {
                    action,
                    size: space.size(seat),
                });
            }
            coords[seat] = Some(action);
        }
        let coords: Vec<usize> = coords
            .into_iter()
            .enumerate()
            .map(|(seat, a)| a.ok_or_else(|| Error::invalid(format!("no action for seat {seat}"))))
            .collect::<Result<_>>()?;
        let team_action = TeamAction(coords);
        let flat = space.flat(&team_action)?;
        let warm_start = self.in_warm_start();
        let outcome = self.model.sample_flat(flat, &mut self.env);
        let observed: Vec<f64> = outcome.observations.iter().map(|o| o.observed_reward).collect();
        for (seat, agent) in self.seats.iter_mut().enumerate() {
            if let Some(agent) = agent {
                agent.observe(&team_action, observed[seat])?;
            }
        }
        if warm_start {
            if let Some((_, seat, agent)) = self.warm.as_mut() {
                agent.observe(&team_action, observed[*seat])?;
            }
        }
        self.records.push(StepRecord {
            t: commitment.t,
            team_action,
            true_reward: outcome.true_reward,
            observed,
            predictions: commitment.predictions.clone(),
            warm_start,
        });
        Ok(self.records.last().expect("just pushed"))
    }

    /// Runs the remaining steps. Fails if a seat is external.
    pub fn run_to_end(&mut self) -> Result<()> {
        while !self.is_done() {
            let c = self.commit()?;
            self.resolve(&c, &[])?;
        }
        Ok(())
    }

    pub fn into_trace(self, seed: u64) -> RunTrace {
        RunTrace {
            seed,
            ranking: self.ranking,
            model: InstanceFile::from_model(&self.model, None),
            steps: self.records,
        }
    }
}

/// Builds the episode for one run of `config` from the run's seed.
pub fn prepare_episode(config: &ExperimentConfig, seed: u64) -> Result<Episode> {
    config.validate()?;
    let root = RngStream::new(seed);
    let model = config.instance.model(&root)?;
    check_compatibility(&model, &config.agents)?;
    let ranking = config.roles.ranking(&model, &root)?;
    let seats = config.agents.iter().cloned().map(Some).collect();
    Episode::new(model, seats, ranking, config.horizon, config.warm_start.as_ref(), &root)
}

/// Runs one full episode.
pub fn run_episode(config: &ExperimentConfig, seed: u64) -> Result<RunTrace> {
    let mut episode = prepare_episode(config, seed)?;
    episode.run_to_end()?;
    Ok(episode.into_trace(seed))
}
