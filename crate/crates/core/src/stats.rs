//! Per-arm statistics, confidence indices and tie-broken selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Pull count and running mean of the rewards an agent observed for one arm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    pub count: u64,
    pub mean: f64,
}

/// Exploration constant `c` and confidence level `delta` of a UCB index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceParams {
    c: f64,
    delta: f64,
}

impl ConfidenceParams {
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("exploration constant must be positive, got {c}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(Self { c, delta })
    }

    /// `delta = 1 / T^2`. Horizons below 2 are treated as 2 so that `delta < 1`.
    pub fn for_horizon(c: f64, horizon: u64) -> Result<Self> {
        let t = horizon.max(2) as f64;
        Self::new(c, 1.0 / (t * t))
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `c * ln(1/delta)`, the numerator under the square root.
    pub fn radius_scale(&self) -> f64 {
        self.c * (1.0 / self.delta).ln()
    }
}

impl ArmStats {
    pub fn update(self, reward: f64) -> Self {
        update_mean(self, reward)
    }
}

/// `mean + sqrt(c ln(1/delta) / count)`, or `+inf` for an unpulled arm.
pub fn ucb_index(stats: ArmStats, params: ConfidenceParams) -> f64 {
    ucb_from_scale(stats, params.radius_scale())
}

#[inline]
pub(crate) fn ucb_from_scale(stats: ArmStats, radius_scale: f64) -> f64 {
    if stats.count == 0 {
        f64::INFINITY
    } else {
        stats.mean + (radius_scale / stats.count as f64).sqrt()
    }
}

pub fn update_mean(stats: ArmStats, reward: f64) -> ArmStats {
    let count = stats.count + 1;
    ArmStats {
        count,
        mean: stats.mean + (reward - stats.mean) / count as f64,
    }
}

/// Index of a maximal value. Ties, including several `+inf`, are resolved by
/// a uniform draw over the tied indices (ascending order); a unique maximum
/// consumes no randomness.
pub fn argmax_tiebreak(values: &[f64], rng: &mut RngStream) -> Result<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<usize> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v > best || ties.is_empty() {
            best = v;
            ties.clear();
            ties.push(i);
        } else if v == best {
            ties.push(i);
        }
    }
    match ties.len() {
        0 => Err(Error::EmptyCandidates),
        1 => Ok(ties[0]),
        n => Ok(ties[rng.index(n)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn p(c: f64, delta: f64) -> ConfidenceParams {
        ConfidenceParams::new(c, delta).unwrap()
    }

    #[test]
    fn unpulled_arm_is_infinite() {
        assert_eq!(ucb_index(ArmStats::default(), p(0.3, 0.1)), f64::INFINITY);
    }

    #[test]
    fn unit_radius() {
        let stats = ArmStats { count: 1, mean: 0.5 };
        let v = ucb_index(stats, p(1.0, (-1.0f64).exp()));
        assert!((v - 1.5).abs() < 1e-15);
    }

    #[test]
    fn matches_high_precision_oracle() {
        // 0.8 + sqrt(0.025 ln(160000) / 16), evaluated at 50 digits with mpmath.
        const ORACLE: f64 = 0.936_833_207_627_799_3;
        let v = ucb_index(ArmStats { count: 16, mean: 0.8 }, p(0.025, 1.0 / 160_000.0));
        assert!((v - ORACLE).abs() < 1e-12, "{v}");
        // horizon form: T = 400
        let q = ConfidenceParams::for_horizon(0.025, 400).unwrap();
        assert!((ucb_index(ArmStats { count: 16, mean: 0.8 }, q) - ORACLE).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ConfidenceParams::new(0.0, 0.5).is_err());
        assert!(ConfidenceParams::new(1.0, 1.0).is_err());
        assert!(ConfidenceParams::new(1.0, 0.0).is_err());
        assert!(ConfidenceParams::for_horizon(1.0, 1).is_ok());
    }

    #[test]
    fn update_examples() {
        assert_eq!(update_mean(ArmStats::default(), 0.0), ArmStats { count: 1, mean: 0.0 });
        let s = update_mean(ArmStats { count: 2, mean: 0.5 }, 1.0);
        assert_eq!(s.count, 3);
        assert!((s.mean - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn streaming_matches_batch_mean() {
        let rewards = [1.0, 0.0, 1.0, 1.0, 0.0];
        let batch = rewards.iter().sum::<f64>() / rewards.len() as f64;
        let s = rewards.iter().fold(ArmStats::default(), |s, &r| s.update(r));
        assert_eq!(s.count, 5);
        assert!((s.mean - batch).abs() < 1e-15);
        assert!((s.mean - 0.6).abs() < 1e-15);
    }

    #[test]
    fn argmax_cases() {
        let mut rng = RngStream::new(0);
        assert!(matches!(argmax_tiebreak(&[], &mut rng), Err(Error::EmptyCandidates)));
        assert_eq!(argmax_tiebreak(&[0.3], &mut rng).unwrap(), 0);
        for _ in 0..200 {
            let i = argmax_tiebreak(&[f64::INFINITY, 0.5, f64::INFINITY], &mut rng).unwrap();
            assert!(i == 0 || i == 2);
        }
        let mut seen = [0usize; 3];
        for _ in 0..2000 {
            seen[argmax_tiebreak(&[0.2, 0.9, 0.9], &mut rng).unwrap()] += 1;
        }
        assert_eq!(seen[0], 0);
        assert!(seen[1] > 800 && seen[2] > 800, "{seen:?}");
    }

    #[test]
    fn unique_max_consumes_no_randomness() {
        let mut a = RngStream::new(5);
        let b = a.clone();
        argmax_tiebreak(&[0.1, 0.7, 0.2], &mut a).unwrap();
        assert_eq!(a.clone().next_u64(), b.clone().next_u64());
    }

    #[test]
    fn tie_break_is_uniform_chi_squared() {
        let mut rng = RngStream::new(2024);
        let values = [0.5, 0.9, 0.1, 0.9, 0.9, 0.9];
        let tied = [1usize, 3, 4, 5];
        let draws = 100_000;
        let mut counts = [0f64; 6];
        for _ in 0..draws {
            counts[argmax_tiebreak(&values, &mut rng).unwrap()] += 1.0;
        }
        let expected = draws as f64 / tied.len() as f64;
        let stat: f64 = tied.iter().map(|&i| (counts[i] - expected).powi(2) / expected).sum();
        let critical = ChiSquared::new((tied.len() - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-3);
        assert!(stat < critical, "chi2 {stat} >= {critical}");
        assert_eq!(counts[0] + counts[2], 0.0);
    }

    proptest! {
        #[test]
        fn index_decreases_in_count(mean in 0.0f64..1.0, c in 0.001f64..10.0, delta in 1e-9f64..0.999, n in 1u64..1_000_000) {
            let q = p(c, delta);
            let a = ucb_index(ArmStats { count: n, mean }, q);
            let b = ucb_index(ArmStats { count: n + 1, mean }, q);
            prop_assert!(b < a);
        }

        #[test]
        fn index_monotone_in_c_and_delta(mean in 0.0f64..1.0, c in 0.001f64..10.0, delta in 1e-9f64..0.5, n in 1u64..10_000) {
            let s = ArmStats { count: n, mean };
            prop_assert!(ucb_index(s, p(c * 1.5, delta)) > ucb_index(s, p(c, delta)));
            prop_assert!(ucb_index(s, p(c, delta * 1.5)) < ucb_index(s, p(c, delta)));
        }

        #[test]
        fn incremental_mean_matches_batch(rewards in prop::collection::vec(0.0f64..=1.0, 10_000)) {
            let s = rewards.iter().fold(ArmStats::default(), |s, &r| s.update(r));
            let batch = rewards.iter().sum::<f64>() / rewards.len() as f64;
            prop_assert!((s.mean - batch).abs() < 1e-12);
        }

        #[test]
        fn argmax_returns_a_maximum(values in prop::collection::vec(prop_oneof![Just(f64::INFINITY), 0.0f64..1.0, Just(0.5)], 1..20), seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let i = argmax_tiebreak(&values, &mut rng).unwrap();
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(values[i], max);
        }

        #[test]
        fn argmax_invariant_under_positive_scaling(values in prop::collection::vec(0.01f64..1.0, 1..20), scale in 0.01f64..100.0) {
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            let best = |vs: &[f64]| {
                let max = vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                vs.iter().enumerate().filter(|(_, &v)| v == max).map(|(i, _)| i).collect::<Vec<_>>()
            };
            // exact equality can split under rounding; compare on strictly separated sets
            let a = best(&values);
            let b = best(&scaled);
            if a.len() == 1 {
                prop_assert_eq!(a, b);
            }
        }
    }
}
