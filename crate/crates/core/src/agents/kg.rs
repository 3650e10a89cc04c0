//! One-step knowledge-gradient valuation over Beta-Bernoulli posteriors.

use serde::{Deserialize, Serialize};

/// Beta posterior counts of one arm. Starts at the uniform prior Beta(1, 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaPosterior {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for BetaPosterior {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }
}

impl BetaPosterior {
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Conjugate update with a reward in [0, 1].
    pub fn update(&mut self, reward: f64) {
        self.alpha += reward;
        self.beta += 1.0 - reward;
    }
}

/// Value of pulling each arm once more and then exploiting the best posterior
/// mean for the `remaining` pulls after it:
///
/// `V_a = p + remaining * (p * max(m+, best_other) + (1 - p) * max(m-, best_other))`
///
/// with `p` the predictive success probability of `a`, `m+`/`m-` its posterior
/// mean after a success/failure, and `best_other` the largest current posterior
/// mean among the other arms.
pub fn kg_values(posteriors: &[BetaPosterior], remaining: u64) -> Vec<f64> {
    let means: Vec<f64> = posteriors.iter().map(BetaPosterior::mean).collect();
    // top two means (with their positions) give best_other for every arm
    let mut first = (f64::NEG_INFINITY, usize::MAX);
    let mut second = f64::NEG_INFINITY;
    for (i, &m) in means.iter().enumerate() {
        if m > first.0 {
            second = first.0;
            first = (m, i);
        } else if m > second {
            second = m;
        }
    }
    let rem = remaining as f64;
    posteriors
        .iter()
        .enumerate()
        .map(|(i, post)| {
            let best_other = if i == first.1 { second } else { first.0 };
            let total = post.alpha + post.beta;
            let p = post.alpha / total;
            let up = (post.alpha + 1.0) / (total + 1.0);
            let down = post.alpha / (total + 1.0);
            p + rem * (p * up.max(best_other) + (1.0 - p) * down.max(best_other))
        })
        .collect()
}
