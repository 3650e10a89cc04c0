//! Human-in-the-loop play.
//!
//! A session pairs a human in seat 0 (the leader, full observability) with an
//! agent in seat 1. On every submit the agent commits to its action first and
//! the commitment is logged; only then is the human's action read. State and
//! traces handed out contain only what the human can see.

mod manager;

use serde::{Deserialize, Serialize};

use crate::agents::{AgentConfig, Strategy};
use crate::env::{preset_random, InstanceFile, RandomChannel, RewardModel};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::runner::{
    pseudo_regret_steps, Commitment, Episode, ExperimentConfig, InstanceSpec, RoleAssignment, RunTrace, WarmStart,
};
use crate::space::{ActionSpace, TeamAction};

pub use manager::{LogEvent, SessionManager};

pub const SESSION_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// 1000 steps against a follower seeing 40% of the coins.
    #[default]
    Casino,
    /// 20 steps after a 20-step warm start with a simulated partner.
    Burger,
}

/// What a client asks for; unset fields come from the protocol defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRequest {
    #[serde(default)]
    pub protocol: Protocol,
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub agent: Option<AgentConfig>,
    #[serde(default)]
    pub agent_observability: Option<f64>,
    /// Actions per seat, default `[2, 2]`.
    #[serde(default)]
    pub shape: Option<Vec<usize>>,
    /// Row-major means; drawn Uniform[0, 1] from the seed when absent.
    #[serde(default)]
    pub means: Option<Vec<f64>>,
    #[serde(default)]
    pub warm_start_steps: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trial: bool,
}

/// Fully resolved session parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub protocol: Protocol,
    /// Steps played by the human, warm start excluded.
    pub horizon: u64,
    pub agent: AgentConfig,
    pub agent_observability: f64,
    pub instance: InstanceFile,
    pub warm_start: Option<WarmStart>,
    pub seed: u64,
    pub trial: bool,
}

impl SessionRequest {
    /// Fills defaults. `fallback_seed` is used when the request has none.
    pub fn resolve(&self, fallback_seed: u64) -> Result<SessionConfig> {
        let (horizon, window, p_agent, warm) = match self.protocol {
            Protocol::Casino => (1000, 5, 0.4, 0),
            Protocol::Burger => (20, 2, 0.5, 20),
        };
        let horizon = self.horizon.unwrap_or(horizon);
        if horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        let agent = self.agent.clone().unwrap_or_else(|| AgentConfig::pa_follower(0.01, window));
        if agent.strategy == Strategy::PaLeader || agent.strategy == Strategy::Scripted {
            return Err(Error::Incompatible(format!(
                "{:?} cannot play next to a human leader",
                agent.strategy
            )));
        }
        let p_agent = self.agent_observability.unwrap_or(p_agent);
        let seed = self.seed.unwrap_or(fallback_seed);
        let space = ActionSpace::new(self.shape.clone().unwrap_or_else(|| vec![2, 2]))?;
        if space.agents() != 2 {
            return Err(Error::invalid("sessions have exactly two seats"));
        }
        let observabilities = vec![1.0, p_agent];
        let model = match &self.means {
            Some(means) => RewardModel::masked_bernoulli(space, means.clone(), observabilities)?,
            None => {
                let channel = RandomChannel::MaskedBernoulli { observabilities };
                let mut rng = RngStream::new(seed).substream("instance");
                preset_random(&space, &channel, &mut rng)?.model
            }
        };
        let warm_steps = self.warm_start_steps.unwrap_or(warm);
        let warm_start = (warm_steps > 0).then(|| WarmStart {
            steps: warm_steps,
            seat: 0,
            substitute: AgentConfig::naive_ucb(0.01),
        });
        Ok(SessionConfig {
            protocol: self.protocol,
            horizon,
            agent,
            agent_observability: p_agent,
            instance: InstanceFile::from_model(&model, Some(seed)),
            warm_start,
            seed,
            trial: self.trial,
        })
    }
}

impl SessionConfig {
    pub fn total_steps(&self) -> u64 {
        self.horizon + self.warm_start.as_ref().map_or(0, |w| w.steps)
    }

    /// The batch-runner equivalent of a session in which the human played
    /// `human_actions`: seat 0 becomes a scripted agent.
    pub fn to_experiment(&self, human_actions: Vec<usize>) -> ExperimentConfig {
        let mut config = ExperimentConfig::new(
            InstanceSpec::Model(self.instance.clone()),
            vec![AgentConfig::scripted(human_actions), self.agent.clone()],
            self.total_steps(),
        )
        .with_seed(self.seed);
        config.roles = RoleAssignment::Explicit(vec![0, 1]);
        config.warm_start = self.warm_start.clone();
        config
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub lucky: u64,
    pub unlucky: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LastStep {
    pub team_action: TeamAction,
    pub coin: bool,
}

/// What the human may see.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub step: u64,
    pub budget_remaining: u64,
    pub horizon: u64,
    /// Sequence number the next submit must carry.
    pub seq: u64,
    pub shape: Vec<usize>,
    /// Lucky/unlucky counts per team action (row-major), human steps only.
    pub tallies: Vec<Tally>,
    pub last: Option<LastStep>,
    pub terminal: bool,
    pub trial: bool,
    pub warm_start_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActResult {
    pub agent_action: usize,
    pub team_action: TeamAction,
    pub observed_reward: f64,
    pub state: SessionState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicStep {
    pub t: u64,
    pub team_action: TeamAction,
    /// The human's observation, which is the true reward.
    pub reward: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub warm_start: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicTrace {
    pub id: String,
    pub shape: Vec<usize>,
    pub steps: Vec<PublicStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub id: String,
    pub steps: u64,
    pub coins: u64,
    /// Cumulative pseudo-regret over the human's steps.
    pub pseudo_regret: f64,
    pub tallies: Vec<Tally>,
}

/// One live game.
#[derive(Clone, Debug)]
pub struct Session {
    id: String,
    config: SessionConfig,
    episode: Episode,
    pending: Option<Commitment>,
    seq: u64,
    tallies: Vec<Tally>,
    human_actions: Vec<usize>,
    closed: bool,
}

impl Session {
    /// Builds the session and plays the warm start, if any.
    pub fn new(id: impl Into<String>, config: SessionConfig) -> Result<Self> {
        let model = config.instance.to_model()?;
        let root = RngStream::new(config.seed);
        let mut episode = Episode::new(
            model,
            vec![None, Some(config.agent.clone())],
            vec![0, 1],
            config.total_steps(),
            config.warm_start.as_ref(),
            &root,
        )?;
        while episode.in_warm_start() {
            let c = episode.commit()?;
            episode.resolve(&c, &[])?;
        }
        let cells = episode.model().space().total();
        Ok(Self {
            id: id.into(),
            config,
            episode,
            pending: None,
            seq: 0,
            tallies: vec![Tally::default(); cells],
            human_actions: Vec::new(),
            closed: false,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn is_terminal(&self) -> bool {
        self.closed || self.episode.is_done()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn human_actions(&self) -> &[usize] {
        &self.human_actions
    }

    /// The agent's action for the next step, committing it if needed.
    /// Returns `(t, action, newly_committed)`.
    pub fn commit(&mut self) -> Result<(u64, usize, bool)> {
        if self.is_terminal() {
            return Err(Error::BudgetExhausted);
        }
        let fresh = self.pending.is_none();
        if fresh {
            self.pending = Some(self.episode.commit()?);
        }
        let c = self.pending.as_ref().expect("set above");
        Ok((c.t, c.actions[1].expect("agent seat"), fresh))
    }

    /// Plays the human's `action`. `seq` must equal the number of accepted
    /// submits so far. The agent's action is fixed before `action` is looked at.
    pub fn submit(&mut self, action: usize, seq: u64) -> Result<ActResult> {
        if self.is_terminal() {
            return Err(Error::BudgetExhausted);
        }
        if seq != self.seq {
            return Err(Error::StaleSequence {
                expected: self.seq,
                got: seq,
            });
        }
        self.commit()?;
        let commitment = self.pending.as_ref().expect("committed");
        let record = self.episode.resolve(commitment, &[(0, action)])?.clone();
        let agent_action = self.pending.take().and_then(|c| c.actions[1]).expect("agent seat");
        let flat = self.episode.model().space().flat(&record.team_action)?;
        let coin = record.observed[0] > 0.5;
        if coin {
            self.tallies[flat].lucky += 1;
        } else {
            self.tallies[flat].unlucky += 1;
        }
        self.human_actions.push(action);
        self.seq += 1;
        Ok(ActResult {
            agent_action,
            team_action: record.team_action,
            observed_reward: record.observed[0],
            state: self.state(),
        })
    }

    fn human_steps(&self) -> &[crate::runner::StepRecord] {
        let warm = self.episode.warm_start_steps() as usize;
        &self.episode.records()[warm..]
    }

    pub fn state(&self) -> SessionState {
        let step = self.human_actions.len() as u64;
        let last = self.human_steps().last().map(|r| LastStep {
            team_action: r.team_action.clone(),
            coin: r.observed[0] > 0.5,
        });
        SessionState {
            id: self.id.clone(),
            step,
            budget_remaining: self.config.horizon - step,
            horizon: self.config.horizon,
            seq: self.seq,
            shape: self.episode.model().space().sizes().to_vec(),
            tallies: self.tallies.clone(),
            last,
            terminal: self.is_terminal(),
            trial: self.config.trial,
            warm_start_steps: self.episode.warm_start_steps(),
        }
    }

    /// Team actions and the human's rewards, warm start included and marked.
    pub fn public_trace(&self) -> PublicTrace {
        PublicTrace {
            id: self.id.clone(),
            shape: self.episode.model().space().sizes().to_vec(),
            steps: self
                .episode
                .records()
                .iter()
                .map(|r| PublicStep {
                    t: r.t,
                    team_action: r.team_action.clone(),
                    reward: r.observed[0],
                    warm_start: r.warm_start,
                })
                .collect(),
        }
    }

    /// Complete trace with the agent's observations, for analysis.
    pub fn full_trace(&self) -> RunTrace {
        self.episode.clone().into_trace(self.config.seed)
    }

    pub fn summary(&self) -> Result<Summary> {
        let steps = self.human_steps();
        let regret = pseudo_regret_steps(steps, self.episode.model())?;
        Ok(Summary {
            id: self.id.clone(),
            steps: steps.len() as u64,
            coins: steps.iter().filter(|r| r.true_reward > 0.5).count() as u64,
            pseudo_regret: regret.last().copied().unwrap_or(0.0),
            tallies: self.tallies.clone(),
        })
    }

    pub fn close(&mut self) -> Result<Summary> {
        self.closed = true;
        self.pending = None;
        self.summary()
    }
}
