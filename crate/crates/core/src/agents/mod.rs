//! Decision strategies.
//!
//! An [`Agent`] sees only its own reward channel and the team actions. Its
//! [`Agent::act`] is called for every seat before any of them observes, which
//! keeps decisions simultaneous.
//!
//! Partner-aware agents form a hierarchy ordered by observability. The top
//! agent (the leader) maximizes its UCB over the whole team-action matrix as
//! if everyone else will comply, holding each choice for `repeat` steps. Every
//! agent below samples a prediction for each higher-ranked agent from a
//! window of that agent's recent actions, fixes those coordinates and
//! maximizes its UCB over the remaining joint actions.

mod kg;
mod roles;

use serde::{Deserialize, Serialize};

pub use kg::{kg_values, BetaPosterior};
pub use roles::{assign_roles, assign_roles_by_noise, roles_for_model};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{ActionSpace, TeamAction};
use crate::stats::{argmax_tiebreak, ucb_from_scale, ArmStats, ConfidenceParams};
use crate::window::WindowHistogram;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    PaLeader,
    PaFollower,
    PaRankK,
    NaiveUcb,
    VeryNaiveUcb,
    NaiveThompson,
    KgLeader,
    /// Replays a fixed action list; used for recorded human play.
    Scripted,
}

impl Strategy {
    pub fn is_bayesian(self) -> bool {
        matches!(self, Strategy::NaiveThompson | Strategy::KgLeader)
    }

    pub fn is_partner_aware(self) -> bool {
        matches!(self, Strategy::PaLeader | Strategy::PaFollower | Strategy::PaRankK)
    }
}

/// How the confidence level of the UCB radius is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// `delta = 1 / T^2`, fixed for the whole run.
    #[default]
    Horizon,
    /// `delta_t = 1 / t^2`, for runs without a known horizon.
    Anytime,
    Fixed(f64),
}

fn default_c() -> f64 {
    crate::env::DEFAULT_C
}

fn default_window() -> usize {
    25
}

fn default_repeat() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub strategy: Strategy,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub delta: DeltaMode,
    /// Prediction window W (followers).
    #[serde(default = "default_window", alias = "w")]
    pub window: usize,
    /// Repetition L (leaders).
    #[serde(default = "default_repeat", alias = "l")]
    pub repeat: usize,
    /// Expected 1-based hierarchy position; checked against the assigned roles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub script: Vec<usize>,
}

impl AgentConfig {
    pub fn new(strategy: Strategy) -> Self {
        Self {
            strategy,
            c: default_c(),
            delta: DeltaMode::Horizon,
            window: default_window(),
            repeat: default_repeat(),
            rank: None,
            script: Vec::new(),
        }
    }

    pub fn pa_leader(c: f64, repeat: usize) -> Self {
        Self {
            c,
            repeat,
            ..Self::new(Strategy::PaLeader)
        }
    }

    pub fn pa_follower(c: f64, window: usize) -> Self {
        Self {
            c,
            window,
            ..Self::new(Strategy::PaFollower)
        }
    }

    pub fn pa_rank_k(c: f64, window: usize, repeat: usize) -> Self {
        Self {
            c,
            window,
            repeat,
            ..Self::new(Strategy::PaRankK)
        }
    }

    pub fn naive_ucb(c: f64) -> Self {
        Self {
            c,
            ..Self::new(Strategy::NaiveUcb)
        }
    }

    pub fn very_naive_ucb(c: f64) -> Self {
        Self {
            c,
            ..Self::new(Strategy::VeryNaiveUcb)
        }
    }

    pub fn scripted(script: Vec<usize>) -> Self {
        Self {
            script,
            ..Self::new(Strategy::Scripted)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("exploration constant must be positive, got {}", self.c)));
        }
        if let DeltaMode::Fixed(d) = self.delta {
            ConfidenceParams::new(self.c, d)?;
        }
        if self.window == 0 {
            return Err(Error::invalid("window W must be at least 1"));
        }
        if self.repeat == 0 {
            return Err(Error::invalid("repetition L must be at least 1"));
        }
        Ok(())
    }
}

/// A follower's sampled guess of a higher-ranked seat's current action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub seat: usize,
    pub action: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub action: usize,
    pub predictions: Vec<Prediction>,
}

/// Random streams owned by one agent.
#[derive(Clone, Debug)]
pub struct AgentStreams {
    pub tie: RngStream,
    pub sample: RngStream,
}

impl AgentStreams {
    /// `agent/<seat>/tie` and `agent/<seat>/sample` under `root`.
    pub fn for_seat(root: &RngStream, seat: usize) -> Self {
        let base = root.substream_indexed("agent", seat as u64);
        Self {
            tie: base.substream("tie"),
            sample: base.substream("sample"),
        }
    }
}

/// One decision maker and everything it has learned.
#[derive(Clone, Debug)]
pub struct Agent {
    config: AgentConfig,
    seat: usize,
    rank: usize,
    space: ActionSpace,
    horizon: u64,
    fixed_scale: Option<f64>,
    stats: Vec<ArmStats>,
    histograms: Vec<(usize, WindowHistogram)>,
    posteriors: Vec<BetaPosterior>,
    last_own: Option<usize>,
    steps: u64,
    script_pos: usize,
    streams: AgentStreams,
}

impl Agent {
    /// `ranking` lists seats from highest to lowest rank.
    pub fn new(
        config: AgentConfig,
        seat: usize,
        space: &ActionSpace,
        ranking: &[usize],
        horizon: u64,
        streams: AgentStreams,
    ) -> Result<Self> {
        config.validate()?;
        let n = space.agents();
        if seat >= n {
            return Err(Error::invalid(format!("seat {seat} outside a team of {n}")));
        }
        let mut seen = vec![false; n];
        if ranking.len() != n || ranking.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true)) {
            return Err(Error::MalformedRank(format!("{ranking:?} is not a permutation of the seats")));
        }
        let rank = ranking.iter().position(|&s| s == seat).expect("permutation") + 1;
        if let Some(expected) = config.rank {
            if expected != rank {
                return Err(Error::MalformedRank(format!(
                    "seat {seat} configured as rank {expected} but assigned rank {rank}"
                )));
            }
        }
        let strategy = config.strategy;
        if strategy.is_partner_aware() && n < 2 {
            return Err(Error::MalformedRank("partner-aware strategies need at least two agents".into()));
        }
        match strategy {
            Strategy::PaLeader if rank != 1 => {
                return Err(Error::MalformedRank(format!("leader on seat {seat} has rank {rank}")));
            }
            Strategy::PaFollower if rank == 1 => {
                return Err(Error::MalformedRank(format!("follower on seat {seat} has the top rank")));
            }
            Strategy::KgLeader if horizon == 0 => {
                return Err(Error::invalid("knowledge-gradient leader needs a horizon"));
            }
            _ => {}
        }
        let histograms = if strategy.is_partner_aware() && rank > 1 {
            ranking[..rank - 1]
                .iter()
                .map(|&s| Ok((s, WindowHistogram::new(config.window, space.size(s))?)))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let arms = if strategy == Strategy::VeryNaiveUcb {
            space.size(seat)
        } else {
            space.total()
        };
        let posteriors = if strategy.is_bayesian() {
            vec![BetaPosterior::default(); space.total()]
        } else {
            Vec::new()
        };
        let fixed_scale = match config.delta {
            DeltaMode::Horizon => Some(ConfidenceParams::for_horizon(config.c, horizon)?.radius_scale()),
            DeltaMode::Fixed(d) => Some(ConfidenceParams::new(config.c, d)?.radius_scale()),
            DeltaMode::Anytime => None,
        };
        Ok(Self {
            config,
            seat,
            rank,
            space: space.clone(),
            horizon,
            fixed_scale,
            stats: vec![ArmStats::default(); arms],
            histograms,
            posteriors,
            last_own: None,
            steps: 0,
            script_pos: 0,
            streams,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn strategy(&self) -> Strategy {
        self.config.strategy
    }

    pub fn seat(&self) -> usize {
        self.seat
    }

    /// 1-based position in the hierarchy.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Per-arm statistics: team actions (row-major), or own actions for
    /// [`Strategy::VeryNaiveUcb`].
    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }

    pub fn histograms(&self) -> &[(usize, WindowHistogram)] {
        &self.histograms
    }

    pub fn posteriors(&self) -> &[BetaPosterior] {
        &self.posteriors
    }

    pub fn last_own_action(&self) -> Option<usize> {
        self.last_own
    }

    /// Number of observed steps.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn radius_scale(&self, t: u64) -> f64 {
        match self.fixed_scale {
            Some(s) => s,
            None => {
                let t = t.max(2) as f64;
                self.config.c * (t * t).ln()
            }
        }
    }

    fn ucb(&self, flat: usize, scale: f64) -> f64 {
        ucb_from_scale(self.stats[flat], scale)
    }

    /// Choose this step's own action. `t` is the 1-based step index.
    pub fn act(&mut self, t: u64) -> Result<Decision> {
        if t == 0 {
            return Err(Error::invalid("steps are numbered from 1"));
        }
        let mut predictions = Vec::new();
        let action = match self.config.strategy {
            Strategy::Scripted => {
                let a = *self.config.script.get(self.script_pos).ok_or(Error::BudgetExhausted)?;
                if a >= self.space.size(self.seat) {
                    return Err(Error::ActionOutOfRange {
                        action: a,
                        size: self.space.size(self.seat),
                    });
                }
                self.script_pos += 1;
                a
            }
            Strategy::PaLeader => self.leader_act(t)?,
            Strategy::PaFollower | Strategy::PaRankK => {
                if self.rank == 1 {
                    self.leader_act(t)?
                } else {
                    self.follower_act(t, &mut predictions)?
                }
            }
            Strategy::NaiveUcb => self.full_matrix_argmax(t)?,
            Strategy::VeryNaiveUcb => {
                let scale = self.radius_scale(t);
                let values: Vec<f64> = (0..self.stats.len()).map(|a| self.ucb(a, scale)).collect();
                argmax_tiebreak(&values, &mut self.streams.tie)?
            }
            Strategy::NaiveThompson => {
                let sample = &mut self.streams.sample;
                let draws: Vec<f64> = self.posteriors.iter().map(|p| sample.beta(p.alpha, p.beta)).collect();
                let flat = argmax_tiebreak(&draws, &mut self.streams.tie)?;
                self.space.coord(flat, self.seat)
            }
            Strategy::KgLeader => {
                if t > self.horizon {
                    return Err(Error::BudgetExhausted);
                }
                let values = kg_values(&self.posteriors, self.horizon - t);
                let flat = argmax_tiebreak(&values, &mut self.streams.tie)?;
                self.space.coord(flat, self.seat)
            }
        };
        self.last_own = Some(action);
        Ok(Decision { action, predictions })
    }

    fn full_matrix_argmax(&mut self, t: u64) -> Result<usize> {
        let scale = self.radius_scale(t);
        let values: Vec<f64> = (0..self.stats.len()).map(|a| self.ucb(a, scale)).collect();
        let flat = argmax_tiebreak(&values, &mut self.streams.tie)?;
        Ok(self.space.coord(flat, self.seat))
    }

    fn leader_act(&mut self, t: u64) -> Result<usize> {
        match self.last_own {
            Some(prev) if (t - 1) % self.config.repeat as u64 != 0 => Ok(prev),
            _ => self.full_matrix_argmax(t),
        }
    }

    fn follower_act(&mut self, t: u64, predictions: &mut Vec<Prediction>) -> Result<usize> {
        let mut fixed = vec![None; self.space.agents()];
        for (seat, hist) in &self.histograms {
            let guess = hist.sample(&mut self.streams.sample);
            fixed[*seat] = Some(guess);
            predictions.push(Prediction {
                seat: *seat,
                action: guess,
            });
        }
        let cells = self.space.cells_matching(&fixed);
        let scale = self.radius_scale(t);
        let values: Vec<f64> = cells.iter().map(|&c| self.ucb(c, scale)).collect();
        let best = argmax_tiebreak(&values, &mut self.streams.tie)?;
        Ok(self.space.coord(cells[best], self.seat))
    }

    /// Record the realized team action and this agent's own observed reward.
    pub fn observe(&mut self, team_action: &TeamAction, own_reward: f64) -> Result<()> {
        let flat = self.space.flat(team_action)?;
        if !own_reward.is_finite() || (self.config.strategy.is_bayesian() && !(0.0..=1.0).contains(&own_reward)) {
            return Err(Error::RewardOutOfRange(own_reward));
        }
        let arm = if self.config.strategy == Strategy::VeryNaiveUcb {
            team_action.0[self.seat]
        } else {
            flat
        };
        self.stats[arm] = self.stats[arm].update(own_reward);
        if let Some(post) = self.posteriors.get_mut(flat) {
            post.update(own_reward);
        }
        for (seat, hist) in &mut self.histograms {
            hist.push(team_action.0[*seat])?;
        }
        self.steps += 1;
        Ok(())
    }
}
