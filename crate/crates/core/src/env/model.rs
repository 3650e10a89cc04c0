use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{ActionSpace, TeamAction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Agent `i` sees the true reward with probability `p_i`, otherwise 0.
    MaskedBernoulli,
    /// Like the masked model but a missed observation reads as 1.
    Flipped,
    /// True reward is Gaussian; each agent sees it plus independent noise.
    Gaussian,
}

/// Which probability the flip attaches to in the flipped variant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipMode {
    /// Observed = r* with probability `p_i`, else 1. `p_i` keeps its meaning
    /// as observation fidelity.
    #[default]
    MissReadsOne,
    /// Observed = 1 with probability `p_i`, else r*.
    OneWithProbabilityP,
}

/// What one agent received on one step. `true_reward` is kept for traces and
/// never handed to an agent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub agent_index: usize,
    pub observed_reward: f64,
    pub true_reward: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub true_reward: f64,
    pub observations: Vec<Observation>,
}

/// True arm means plus the per-agent observation channel.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardModel {
    space: ActionSpace,
    variant: Variant,
    flip_mode: FlipMode,
    means: Vec<f64>,
    true_stds: Vec<f64>,
    observabilities: Vec<f64>,
    noise_stds: Vec<f64>,
}

fn check_probabilities(ps: &[f64], agents: usize) -> Result<()> {
    if ps.len() != agents {
        return Err(Error::invalid(format!(
            "expected {agents} observabilities, got {}",
            ps.len()
        )));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("observability {p} outside [0, 1]")));
    }
    Ok(())
}

impl RewardModel {
    pub fn masked_bernoulli(space: ActionSpace, means: Vec<f64>, observabilities: Vec<f64>) -> Result<Self> {
        Self::bernoulli(space, Variant::MaskedBernoulli, FlipMode::default(), means, observabilities)
    }

    pub fn flipped(
        space: ActionSpace,
        means: Vec<f64>,
        observabilities: Vec<f64>,
        flip_mode: FlipMode,
    ) -> Result<Self> {
        Self::bernoulli(space, Variant::Flipped, flip_mode, means, observabilities)
    }

    fn bernoulli(
        space: ActionSpace,
        variant: Variant,
        flip_mode: FlipMode,
        means: Vec<f64>,
        observabilities: Vec<f64>,
    ) -> Result<Self> {
        if means.len() != space.total() {
            return Err(Error::invalid(format!(
                "expected {} means, got {}",
                space.total(),
                means.len()
            )));
        }
        if let Some(m) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::invalid(format!("Bernoulli mean {m} outside [0, 1]")));
        }
        check_probabilities(&observabilities, space.agents())?;
        Ok(Self {
            space,
            variant,
            flip_mode,
            means,
            true_stds: Vec::new(),
            observabilities,
            noise_stds: Vec::new(),
        })
    }

    pub fn gaussian(
        space: ActionSpace,
        means: Vec<f64>,
        true_stds: Vec<f64>,
        noise_stds: Vec<f64>,
    ) -> Result<Self> {
        if means.len() != space.total() || true_stds.len() != space.total() {
            return Err(Error::invalid("means and true stds must cover every team action"));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("Gaussian means must be finite"));
        }
        if true_stds.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("true reward stds must be positive"));
        }
        if noise_stds.len() != space.agents() || noise_stds.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::invalid("need one non-negative noise std per agent"));
        }
        Ok(Self {
            space,
            variant: Variant::Gaussian,
            flip_mode: FlipMode::default(),
            means,
            true_stds,
            observabilities: Vec::new(),
            noise_stds,
        })
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn flip_mode(&self) -> FlipMode {
        self.flip_mode
    }

    /// Row-major means.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mean(&self, flat: usize) -> f64 {
        self.means[flat]
    }

    pub fn true_stds(&self) -> &[f64] {
        &self.true_stds
    }

    /// Empty for the Gaussian variant.
    pub fn observabilities(&self) -> &[f64] {
        &self.observabilities
    }

    /// Empty for the Bernoulli variants.
    pub fn noise_stds(&self) -> &[f64] {
        &self.noise_stds
    }

    pub fn is_bernoulli(&self) -> bool {
        self.variant != Variant::Gaussian
    }

    /// Lexicographically first team action of maximal mean (flat index).
    pub fn optimal_action(&self) -> usize {
        let mut best = 0;
        for (i, &m) in self.means.iter().enumerate() {
            if m > self.means[best] {
                best = i;
            }
        }
        best
    }

    /// True when more than one team action attains the maximal mean.
    pub fn is_degenerate(&self) -> bool {
        let best = self.means[self.optimal_action()];
        self.means.iter().filter(|&&m| m == best).count() > 1
    }

    pub fn optimal_mean(&self) -> f64 {
        self.means[self.optimal_action()]
    }

    /// Suboptimality gap of a team action.
    pub fn gap(&self, flat: usize) -> f64 {
        self.optimal_mean() - self.means[flat]
    }

    pub fn max_gap(&self) -> f64 {
        let worst = self.means.iter().cloned().fold(f64::INFINITY, f64::min);
        self.optimal_mean() - worst
    }

    /// Scale between a mean gap and the expected gap in team reward, where
    /// the team reward is the average of the agents' observed rewards.
    pub fn regret_scale(&self) -> f64 {
        let n = self.space.agents() as f64;
        match (self.variant, self.flip_mode) {
            (Variant::Gaussian, _) => 1.0,
            (Variant::Flipped, FlipMode::OneWithProbabilityP) => {
                self.observabilities.iter().map(|p| 1.0 - p).sum::<f64>() / n
            }
            _ => self.observabilities.iter().sum::<f64>() / n,
        }
    }

    /// Expected value of agent `agent`'s observation when `a` is played.
    pub fn expected_observed_mean(&self, a: &TeamAction, agent: usize) -> Result<f64> {
        let flat = self.space.flat(a)?;
        if agent >= self.space.agents() {
            return Err(Error::ActionOutOfRange {
                action: agent,
                size: self.space.agents(),
            });
        }
        let mu = self.means[flat];
        Ok(match self.variant {
            Variant::MaskedBernoulli => self.observabilities[agent] * mu,
            Variant::Flipped => {
                let p = self.observabilities[agent];
                match self.flip_mode {
                    FlipMode::MissReadsOne => p * mu + (1.0 - p),
                    FlipMode::OneWithProbabilityP => (1.0 - p) * mu + p,
                }
            }
            Variant::Gaussian => mu,
        })
    }

    /// One shared true reward, then one independent observation draw per
    /// agent. The draw count per step is fixed by the variant and the number
    /// of agents, never by the outcome.
    pub fn sample_step(&self, a: &TeamAction, rng: &mut RngStream) -> Result<StepOutcome> {
        let flat = self.space.flat(a)?;
        Ok(self.sample_flat(flat, rng))
    }

    pub(crate) fn sample_flat(&self, flat: usize, rng: &mut RngStream) -> StepOutcome {
        let mu = self.means[flat];
        let agents = self.space.agents();
        let mut observations = Vec::with_capacity(agents);
        let true_reward = match self.variant {
            Variant::MaskedBernoulli | Variant::Flipped => {
                let r = if rng.bernoulli(mu) { 1.0 } else { 0.0 };
                for (i, &p) in self.observabilities.iter().enumerate() {
                    let seen = rng.bernoulli(p);
                    let observed = match (self.variant, self.flip_mode, seen) {
                        (Variant::MaskedBernoulli, _, true) => r,
                        (Variant::MaskedBernoulli, _, false) => 0.0,
                        (_, FlipMode::MissReadsOne, true) => r,
                        (_, FlipMode::MissReadsOne, false) => 1.0,
                        (_, FlipMode::OneWithProbabilityP, true) => 1.0,
                        (_, FlipMode::OneWithProbabilityP, false) => r,
                    };
                    observations.push(Observation {
                        agent_index: i,
                        observed_reward: observed,
                        true_reward: r,
                    });
                }
                r
            }
            Variant::Gaussian => {
                let r = mu + self.true_stds[flat] * rng.gaussian();
                for (i, &sigma) in self.noise_stds.iter().enumerate() {
                    observations.push(Observation {
                        agent_index: i,
                        observed_reward: r + sigma * rng.gaussian(),
                        true_reward: r,
                    });
                }
                r
            }
        };
        StepOutcome {
            true_reward,
            observations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(p: Vec<f64>) -> RewardModel {
        RewardModel::masked_bernoulli(ActionSpace::new(vec![2, 2]).unwrap(), vec![0.8, 0.4, 0.2, 0.6], p).unwrap()
    }

    #[test]
    fn rejects_invalid_models() {
        let space = ActionSpace::new(vec![2, 2]).unwrap();
        assert!(RewardModel::masked_bernoulli(space.clone(), vec![0.5; 3], vec![1.0, 1.0]).is_err());
        assert!(RewardModel::masked_bernoulli(space.clone(), vec![1.5, 0.1, 0.1, 0.1], vec![1.0, 1.0]).is_err());
        assert!(RewardModel::masked_bernoulli(space.clone(), vec![0.5; 4], vec![1.0, 1.1]).is_err());
        assert!(RewardModel::gaussian(space, vec![0.5; 4], vec![0.0; 4], vec![0.1, 0.1]).is_err());
    }

    #[test]
    fn full_and_zero_observability() {
        let m = two_by_two(vec![1.0, 0.0]);
        let mut rng = RngStream::new(3);
        for f in 0..4 {
            let a = m.space().action(f);
            for _ in 0..500 {
                let out = m.sample_step(&a, &mut rng).unwrap();
                assert_eq!(out.observations[0].observed_reward, out.true_reward);
                assert_eq!(out.observations[1].observed_reward, 0.0);
            }
        }
    }

    #[test]
    fn one_shared_true_reward() {
        let m = two_by_two(vec![1.0, 1.0]);
        let mut rng = RngStream::new(8);
        let a = TeamAction(vec![1, 1]);
        for _ in 0..1000 {
            let out = m.sample_step(&a, &mut rng).unwrap();
            assert_eq!(out.observations[0].observed_reward, out.observations[1].observed_reward);
        }
    }

    #[test]
    fn masked_observations_are_zero_or_true() {
        let m = two_by_two(vec![0.7, 0.3]);
        let mut rng = RngStream::new(4);
        for _ in 0..1000 {
            let out = m.sample_step(&TeamAction(vec![0, 0]), &mut rng).unwrap();
            for o in out.observations {
                assert!(o.observed_reward == 0.0 || o.observed_reward == o.true_reward);
            }
        }
    }

    #[test]
    fn expected_means() {
        let space = ActionSpace::new(vec![1, 1]).unwrap();
        let a = TeamAction(vec![0, 0]);
        let m = RewardModel::masked_bernoulli(space.clone(), vec![0.8], vec![0.5, 1.0]).unwrap();
        assert!((m.expected_observed_mean(&a, 0).unwrap() - 0.4).abs() < 1e-15);
        let f = RewardModel::flipped(space.clone(), vec![0.8], vec![1.0, 0.5], FlipMode::MissReadsOne).unwrap();
        assert_eq!(f.expected_observed_mean(&a, 0).unwrap(), 0.8);
        assert!((f.expected_observed_mean(&a, 1).unwrap() - 0.9).abs() < 1e-15);
        let g = RewardModel::gaussian(space, vec![0.3], vec![0.2], vec![0.5, 0.1]).unwrap();
        assert_eq!(g.expected_observed_mean(&a, 0).unwrap(), 0.3);
        assert!(g.expected_observed_mean(&TeamAction(vec![1, 0]), 0).is_err());
    }

    // Law of large numbers against the analytic channel means, 3 standard errors.
    #[test]
    fn observed_means_converge() {
        let n = 1_000_000;
        let space = ActionSpace::new(vec![1, 1]).unwrap();
        let a = TeamAction(vec![0, 0]);
        let models = [
            RewardModel::masked_bernoulli(space.clone(), vec![0.8], vec![0.5, 1.0]).unwrap(),
            RewardModel::flipped(space.clone(), vec![0.3], vec![0.6, 0.2], FlipMode::MissReadsOne).unwrap(),
            RewardModel::flipped(space.clone(), vec![0.3], vec![0.6, 0.2], FlipMode::OneWithProbabilityP).unwrap(),
            RewardModel::gaussian(space, vec![0.3], vec![0.4], vec![0.1, 0.5]).unwrap(),
        ];
        for (k, m) in models.iter().enumerate() {
            let mut rng = RngStream::new(100 + k as u64);
            let mut sums = [0.0f64; 2];
            let mut sq = [0.0f64; 2];
            for _ in 0..n {
                let out = m.sample_step(&a, &mut rng).unwrap();
                for o in &out.observations {
                    sums[o.agent_index] += o.observed_reward;
                    sq[o.agent_index] += o.observed_reward * o.observed_reward;
                }
            }
            for agent in 0..2 {
                let mean = sums[agent] / n as f64;
                let var = sq[agent] / n as f64 - mean * mean;
                let se = (var / n as f64).sqrt().max(1e-12);
                let expected = m.expected_observed_mean(&a, agent).unwrap();
                assert!(
                    (mean - expected).abs() < 3.0 * se + 1e-12,
                    "model {k} agent {agent}: {mean} vs {expected} (se {se})"
                );
            }
        }
    }

    #[test]
    fn gaps_and_scale() {
        let m = two_by_two(vec![1.0, 0.5]);
        assert_eq!(m.optimal_action(), 0);
        assert!(!m.is_degenerate());
        assert!((m.max_gap() - 0.6).abs() < 1e-15);
        assert!((m.gap(3) - 0.2).abs() < 1e-15);
        assert_eq!(m.regret_scale(), 0.75);
        let tied = RewardModel::masked_bernoulli(
            ActionSpace::new(vec![2, 2]).unwrap(),
            vec![0.8, 0.8, 0.2, 0.6],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(tied.is_degenerate());
        assert_eq!(tied.optimal_action(), 0);
    }
}
