use serde::{Deserialize, Serialize};

use super::episode::{RunTrace, StepRecord};
use crate::env::{RewardModel, Variant};
use crate::error::{Error, Result};

/// Cumulative pseudo-regret after each step: the running sum of
/// `kappa * (mu* - mu(a_t))`, with `kappa` the model's regret scale.
pub fn pseudo_regret(trace: &RunTrace, model: &RewardModel) -> Result<Vec<f64>> {
    pseudo_regret_steps(&trace.steps, model)
}

pub fn pseudo_regret_steps(steps: &[StepRecord], model: &RewardModel) -> Result<Vec<f64>> {
    let kappa = model.regret_scale();
    let mut total = 0.0;
    steps
        .iter()
        .map(|s| {
            total += kappa * model.gap(model.space().flat(&s.team_action)?);
            Ok(total)
        })
        .collect()
}

/// Per-step mean and standard error across runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl Aggregate {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Mean regret at the last step.
    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }
}

/// Standard error uses the sample standard deviation (`n - 1`); a single run
/// has zero standard error.
pub fn aggregate(curves: &[Vec<f64>]) -> Result<Aggregate> {
    let Some(first) = curves.first() else {
        return Ok(Aggregate::default());
    };
    let len = first.len();
    if let Some(bad) = curves.iter().find(|c| c.len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    let r = curves.len() as f64;
    let mut mean = vec![0.0; len];
    let mut stderr = vec![0.0; len];
    for t in 0..len {
        let m = curves.iter().map(|c| c[t]).sum::<f64>() / r;
        mean[t] = m;
        if curves.len() > 1 {
            let var = curves.iter().map(|c| (c[t] - m).powi(2)).sum::<f64>() / (r - 1.0);
            stderr[t] = (var / r).sqrt();
        }
    }
    Ok(Aggregate {
        runs: curves.len(),
        mean,
        stderr,
    })
}

/// Logarithmic regret bound for a two-agent masked Bernoulli instance.
///
/// Rows index the leader (the seat with the larger observability):
///
/// `(p_max + p_min) * D_max * [ sum_{i != i*} 16 / (p_max^2 D_i^2) ln T
///   + sum_i sum_{j != j*(i)} 16 / (q^2 Dt_ij^2) ln T + 3 |A_L| |A_F| / 2 ]`
///
/// where `j*(i)` is row `i`'s best column, `D_i = mu* - mu(i, j*(i))`,
/// `Dt_ij = mu(i, j*(i)) - mu(i, j)` and `q = p_max`, or `p_min` when
/// `conservative` is set.
pub fn theorem1_bound(model: &RewardModel, horizon: u64, conservative: bool) -> Result<f64> {
    if model.variant() != Variant::MaskedBernoulli || model.space().agents() != 2 {
        return Err(Error::Incompatible(
            "the bound covers two-agent masked Bernoulli instances".into(),
        ));
    }
    if model.is_degenerate() {
        return Err(Error::DegenerateInstance("tied optimal team actions".into()));
    }
    if horizon < 1 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let ps = model.observabilities();
    let leader = if ps[1] > ps[0] { 1 } else { 0 };
    let (p_max, p_min) = (ps[leader], ps[1 - leader]);
    if p_min <= 0.0 {
        return Err(Error::DegenerateInstance("zero observability".into()));
    }
    let space = model.space();
    let (rows, cols) = (space.size(leader), space.size(1 - leader));
    let mu = |i: usize, j: usize| {
        let coords = if leader == 0 { [i, j] } else { [j, i] };
        model.mean(space.flat_unchecked(&coords))
    };
    let best = model.optimal_mean();
    let star_row = space.coord(model.optimal_action(), leader);
    let q = if conservative { p_min } else { p_max };
    let mut coefficient = 0.0;
    for i in 0..rows {
        let row_best = (0..cols).map(|j| mu(i, j)).fold(f64::NEG_INFINITY, f64::max);
        if i != star_row {
            let gap = best - row_best;
            if gap <= 0.0 {
                return Err(Error::DegenerateInstance(format!("row {i} best equals the optimum")));
            }
            coefficient += 16.0 / (p_max * p_max * gap * gap);
        }
        let j_star = (0..cols).position(|j| mu(i, j) == row_best).expect("non-empty row");
        for j in (0..cols).filter(|&j| j != j_star) {
            let gap = row_best - mu(i, j);
            if gap <= 0.0 {
                return Err(Error::DegenerateInstance(format!("row {i} has tied best columns")));
            }
            coefficient += 16.0 / (q * q * gap * gap);
        }
    }
    let ln_t = (horizon as f64).ln();
    Ok((p_max + p_min) * model.max_gap() * (coefficient * ln_t + 1.5 * (rows * cols) as f64))
}

/// Shape diagnostics of a cumulative regret curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sublinearity {
    /// `R(T) / R(T/2)`: about 2 for linear growth, close to 1 for logarithmic.
    pub doubling_ratio: f64,
    /// Least-squares slope of `R(t)` against `ln t` over `t` in `[T/2, T]`.
    pub log_slope: f64,
    /// `(R(T) - R(0.9 T)) / (0.1 T)`.
    pub tail_rate: f64,
}

/// `curve[t - 1]` is the regret after step `t`. Needs at least 100 steps.
/// A curve that is zero at both `T/2` and `T` has doubling ratio 1.
pub fn sublinearity_metrics(curve: &[f64]) -> Result<Sublinearity> {
    let n = curve.len();
    if n < 100 {
        return Err(Error::invalid(format!("need at least 100 steps, got {n}")));
    }
    let at = |t: usize| if t == 0 { 0.0 } else { curve[t - 1] };
    let half = n / 2;
    let (end, mid) = (at(n), at(half));
    let doubling_ratio = if mid == 0.0 {
        if end == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        end / mid
    };
    let points: Vec<(f64, f64)> = (half..=n).map(|t| ((t as f64).ln(), at(t))).collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let tail_start = n * 9 / 10;
    Ok(Sublinearity {
        doubling_ratio,
        log_slope: sxy / sxx,
        tail_rate: (end - at(tail_start)) / (n - tail_start) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::preset_fixed_2x2;
    use crate::space::{ActionSpace, TeamAction};

    fn steps_at(cells: &[[usize; 2]]) -> Vec<StepRecord> {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| StepRecord {
                t: i as u64 + 1,
                team_action: TeamAction(c.to_vec()),
                true_reward: 0.0,
                observed: vec![0.0, 0.0],
                predictions: vec![vec![], vec![]],
                warm_start: false,
            })
            .collect()
    }

    #[test]
    fn regret_examples() {
        let model = preset_fixed_2x2().model;
        let r = pseudo_regret_steps(&steps_at(&[[1, 1]]), &model).unwrap();
        assert!((r[0] - 0.15).abs() < 1e-15);
        let r = pseudo_regret_steps(&steps_at(&[[0, 0]; 50]), &model).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));
        let r = pseudo_regret_steps(&steps_at(&[[1, 0]; 1000]), &model).unwrap();
        assert!((r[999] - 0.75 * 0.6 * 1000.0).abs() < 1e-9);
    }

    #[test]
    fn aggregate_examples() {
        let a = aggregate(&[vec![0.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(a.mean, vec![1.0, 3.0]);
        assert_eq!(a.stderr, vec![1.0, 1.0]);
        let same = aggregate(&vec![vec![1.0, 5.0]; 4]).unwrap();
        assert_eq!(same.stderr, vec![0.0, 0.0]);
        assert_eq!(same.mean, vec![1.0, 5.0]);
        assert!(matches!(
            aggregate(&[vec![1.0], vec![1.0, 2.0]]),
            Err(Error::LengthMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn aggregate_bernoulli_stderr() {
        // alternating 0/1 runs: sample std of {0,1}^100 balanced is ~0.5025
        let curves: Vec<Vec<f64>> = (0..100).map(|i| vec![(i % 2) as f64]).collect();
        let a = aggregate(&curves).unwrap();
        assert!((a.stderr[0] - 0.05).abs() < 0.001);
    }

    #[test]
    fn bound_scales_with_gaps() {
        let full = theorem1_bound(&preset_fixed_2x2().model, 10_000, false).unwrap();
        // half every gap: means 0.8 - g/2 relative to the optimum
        let halved = RewardModel::masked_bernoulli(
            ActionSpace::square(2, 2).unwrap(),
            vec![0.8, 0.6, 0.5, 0.7],
            vec![1.0, 0.5],
        )
        .unwrap();
        let h = theorem1_bound(&halved, 10_000, false).unwrap();
        let ln_t = 10_000f64.ln();
        let inner_full = full / (1.5 * 0.6) - 6.0;
        let inner_half = h / (1.5 * 0.3) - 6.0;
        assert!((inner_half / ln_t - 4.0 * inner_full / ln_t).abs() < 1e-9);
    }

    #[test]
    fn bound_prefactor_full_observability() {
        let model = RewardModel::masked_bernoulli(
            ActionSpace::square(2, 2).unwrap(),
            vec![0.8, 0.4, 0.2, 0.6],
            vec![1.0, 1.0],
        )
        .unwrap();
        let b = theorem1_bound(&model, 100, false).unwrap();
        assert!((b - 2.0 * 0.6 * (600.0 * 100f64.ln() + 6.0)).abs() < 1e-9);
    }

    #[test]
    fn bound_monotone_and_conservative() {
        let model = preset_fixed_2x2().model;
        let mut last = 0.0;
        for t in [10, 100, 1000, 10_000] {
            let b = theorem1_bound(&model, t, false).unwrap();
            assert!(b > last);
            last = b;
        }
        assert!(theorem1_bound(&model, 1000, true).unwrap() > theorem1_bound(&model, 1000, false).unwrap());
        let sharper = RewardModel::masked_bernoulli(model.space().clone(), model.means().to_vec(), vec![0.8, 0.5]).unwrap();
        assert!(theorem1_bound(&sharper, 1000, false).unwrap() > theorem1_bound(&model, 1000, false).unwrap());
    }

    #[test]
    fn bound_rejects_degenerate_rows() {
        let model = RewardModel::masked_bernoulli(
            ActionSpace::square(2, 2).unwrap(),
            vec![0.8, 0.4, 0.5, 0.5],
            vec![1.0, 0.5],
        )
        .unwrap();
        assert!(matches!(theorem1_bound(&model, 100, false), Err(Error::DegenerateInstance(_))));
    }

    #[test]
    fn sublinearity_shapes() {
        let linear: Vec<f64> = (1..=1000).map(|t| 0.3 * t as f64).collect();
        let s = sublinearity_metrics(&linear).unwrap();
        assert!((s.doubling_ratio - 2.0).abs() < 1e-12);
        assert!((s.tail_rate - 0.3).abs() < 1e-9);
        let flat = vec![4.0; 200];
        let s = sublinearity_metrics(&flat).unwrap();
        assert_eq!(s.doubling_ratio, 1.0);
        assert_eq!(s.tail_rate, 0.0);
        assert!(s.log_slope.abs() < 1e-12);
        let zero = vec![0.0; 200];
        assert_eq!(sublinearity_metrics(&zero).unwrap().doubling_ratio, 1.0);
        assert!(sublinearity_metrics(&[1.0; 99]).is_err());
    }

    #[test]
    fn log_curve_slope() {
        let log: Vec<f64> = (1..=10_000).map(|t| 3.0 * (t as f64).ln()).collect();
        let s = sublinearity_metrics(&log).unwrap();
        assert!((s.log_slope - 3.0).abs() < 1e-9);
    }
}
