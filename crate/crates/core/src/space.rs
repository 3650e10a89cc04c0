//! Team action spaces.
//!
//! A team action picks one coordinate per agent; the space is the product of
//! the per-agent action sets. Cells are stored row-major, so flat index order
//! coincides with the lexicographic order of team actions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ActionSpace {
    sizes: Vec<usize>,
    total: usize,
}

/// One coordinate per agent, in seat order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamAction(pub Vec<usize>);

impl ActionSpace {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("action space needs at least one agent"));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid("every agent needs at least one action"));
        }
        let total = sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::invalid("team action count overflows"))?;
        Ok(Self { sizes, total })
    }

    /// `agents` agents with `k` actions each.
    pub fn square(k: usize, agents: usize) -> Result<Self> {
        Self::new(vec![k; agents])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn agents(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, agent: usize) -> usize {
        self.sizes[agent]
    }

    /// Number of team actions.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn contains(&self, action: &TeamAction) -> bool {
        action.0.len() == self.sizes.len() && action.0.iter().zip(&self.sizes).all(|(a, s)| a < s)
    }

    /// Row-major flat index of a team action.
    pub fn flat(&self, action: &TeamAction) -> Result<usize> {
        if !self.contains(action) {
            return Err(Error::BadTeamAction(action.0.clone()));
        }
        Ok(self.flat_unchecked(&action.0))
    }

    pub(crate) fn flat_unchecked(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&c, &s)| acc * s + c)
    }

    pub fn action(&self, mut flat: usize) -> TeamAction {
        debug_assert!(flat < self.total);
        let mut coords = vec![0; self.sizes.len()];
        for (slot, &s) in coords.iter_mut().zip(&self.sizes).rev() {
            *slot = flat % s;
            flat /= s;
        }
        TeamAction(coords)
    }

    /// Coordinate of `agent` in the cell with flat index `flat`.
    pub fn coord(&self, flat: usize, agent: usize) -> usize {
        let stride: usize = self.sizes[agent + 1..].iter().product();
        (flat / stride) % self.sizes[agent]
    }

    /// Flat indices of every cell agreeing with `fixed` on its `Some`
    /// coordinates, in lexicographic order.
    pub fn cells_matching(&self, fixed: &[Option<usize>]) -> Vec<usize> {
        debug_assert_eq!(fixed.len(), self.sizes.len());
        let mut coords: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
        let free: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
        let count: usize = free.iter().map(|&i| self.sizes[i]).product();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(self.flat_unchecked(&coords));
            for &i in free.iter().rev() {
                coords[i] += 1;
                if coords[i] < self.sizes[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
        out
    }
}

impl TryFrom<Vec<usize>> for ActionSpace {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        Self::new(sizes)
    }
}

impl From<ActionSpace> for Vec<usize> {
    fn from(space: ActionSpace) -> Self {
        space.sizes
    }
}

impl TeamAction {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(ActionSpace::new(vec![]).is_err());
        assert!(ActionSpace::new(vec![2, 0]).is_err());
        assert!(ActionSpace::new(vec![usize::MAX, 2]).is_err());
    }

    #[test]
    fn flat_order_is_lexicographic() {
        let space = ActionSpace::new(vec![2, 3]).unwrap();
        let all: Vec<TeamAction> = (0..space.total()).map(|f| space.action(f)).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(space.flat(&TeamAction(vec![1, 2])).unwrap(), 5);
        assert!(space.flat(&TeamAction(vec![2, 0])).is_err());
    }

    #[test]
    fn cells_matching_fixes_prefix() {
        let space = ActionSpace::new(vec![2, 2, 2]).unwrap();
        let cells = space.cells_matching(&[Some(1), None, None]);
        let actions: Vec<_> = cells.iter().map(|&c| space.action(c).0).collect();
        assert_eq!(
            actions,
            vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0], vec![1, 1, 1]]
        );
        let cells = space.cells_matching(&[None, Some(0), None]);
        let actions: Vec<_> = cells.iter().map(|&c| space.action(c).0).collect();
        assert_eq!(
            actions,
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![1, 0, 0], vec![1, 0, 1]]
        );
    }

    proptest! {
        #[test]
        fn flat_roundtrip(sizes in prop::collection::vec(1usize..5, 1..4), seed in any::<usize>()) {
            let space = ActionSpace::new(sizes).unwrap();
            let flat = seed % space.total();
            let action = space.action(flat);
            prop_assert!(space.contains(&action));
            prop_assert_eq!(space.flat(&action).unwrap(), flat);
            for agent in 0..space.agents() {
                prop_assert_eq!(space.coord(flat, agent), action.0[agent]);
            }
        }
    }
}
