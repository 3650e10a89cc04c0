use crate::env::{RewardModel, Variant};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Hierarchy of seats, highest rank first.
///
/// Known observabilities sort descending (stable, so ties keep seat order);
/// if every entry is unknown the ordering is a uniform random permutation.
pub fn assign_roles(observabilities: &[Option<f64>], rng: &mut RngStream) -> Result<Vec<usize>> {
    if observabilities.len() < 2 {
        return Err(Error::invalid("role assignment needs at least two agents"));
    }
    let known: Vec<f64> = observabilities.iter().flatten().copied().collect();
    if known.is_empty() {
        let mut order: Vec<usize> = (0..observabilities.len()).collect();
        // Fisher-Yates from the back
        for i in (1..order.len()).rev() {
            let j = rng.index(i + 1);
            order.swap(i, j);
        }
        return Ok(order);
    }
    if known.len() != observabilities.len() {
        return Err(Error::MixedObservability);
    }
    let mut order: Vec<usize> = (0..known.len()).collect();
    order.sort_by(|&a, &b| known[b].total_cmp(&known[a]));
    Ok(order)
}

/// Gaussian channels: the noisier agent follows, so sort ascending by noise std.
pub fn assign_roles_by_noise(noise_stds: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..noise_stds.len()).collect();
    order.sort_by(|&a, &b| noise_stds[a].total_cmp(&noise_stds[b]));
    order
}

/// Roles derived from a model's observation channels.
pub fn roles_for_model(model: &RewardModel) -> Vec<usize> {
    match model.variant() {
        Variant::Gaussian => assign_roles_by_noise(model.noise_stds()),
        _ => {
            let ps: Vec<Option<f64>> = model.observabilities().iter().map(|&p| Some(p)).collect();
            if ps.len() < 2 {
                return (0..ps.len()).collect();
            }
            assign_roles(&ps, &mut RngStream::new(0)).expect("known observabilities")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_by_observability() {
        let mut rng = RngStream::new(0);
        assert_eq!(assign_roles(&[Some(1.0), Some(0.5)], &mut rng).unwrap(), vec![0, 1]);
        assert_eq!(assign_roles(&[Some(0.5), Some(0.5)], &mut rng).unwrap(), vec![0, 1]);
        assert_eq!(
            assign_roles(&[Some(1.0 / 3.0), Some(2.0 / 3.0), Some(1.0)], &mut rng).unwrap(),
            vec![2, 1, 0]
        );
    }

    #[test]
    fn gaussian_leader_has_less_noise() {
        assert_eq!(assign_roles_by_noise(&[0.1, 0.5]), vec![0, 1]);
        assert_eq!(assign_roles_by_noise(&[0.5, 0.1]), vec![1, 0]);
    }

    #[test]
    fn mixed_knowledge_is_an_error() {
        let mut rng = RngStream::new(0);
        let err = assign_roles(&[Some(1.0), None], &mut rng).unwrap_err();
        assert_eq!(err.to_string(), "observability knowledge must be homogeneous");
    }

    #[test]
    fn unknown_gives_uniform_permutations() {
        let mut rng = RngStream::new(12);
        let mut leader_counts = [0usize; 3];
        for _ in 0..30_000 {
            let order = assign_roles(&[None, None, None], &mut rng).unwrap();
            let mut sorted = order.clone();
            sorted.sort();
            assert_eq!(sorted, vec![0, 1, 2]);
            leader_counts[order[0]] += 1;
        }
        for c in leader_counts {
            assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015, "{leader_counts:?}");
        }
    }
}
