//! Sliding-window histogram of a partner's recent actions.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// The last `window` actions of one partner and their tallies.
///
/// Before any push the prediction distribution is uniform over the partner's
/// action set; afterwards it is the empirical distribution of the buffer,
/// whose length is `min(t, window)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowHistogram {
    window: usize,
    actions: usize,
    buffer: VecDeque<usize>,
    counts: Vec<u64>,
}

impl WindowHistogram {
    pub fn new(window: usize, actions: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::invalid("window must be at least 1"));
        }
        if actions == 0 {
            return Err(Error::invalid("partner action set is empty"));
        }
        Ok(Self {
            window,
            actions,
            buffer: VecDeque::with_capacity(window),
            counts: vec![0; actions],
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn push(&mut self, action: usize) -> Result<()> {
        if action >= self.actions {
            return Err(Error::ActionOutOfRange {
                action,
                size: self.actions,
            });
        }
        if self.buffer.len() == self.window {
            let old = self.buffer.pop_front().expect("full buffer");
            self.counts[old] -= 1;
        }
        self.buffer.push_back(action);
        self.counts[action] += 1;
        Ok(())
    }

    /// Normalized distribution over the partner's actions.
    pub fn distribution(&self) -> Vec<f64> {
        if self.buffer.is_empty() {
            return vec![1.0 / self.actions as f64; self.actions];
        }
        let n = self.buffer.len() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Draw a predicted action. Picking a uniform buffer slot samples the
    /// normalized histogram exactly.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        if self.buffer.is_empty() {
            rng.index(self.actions)
        } else {
            self.buffer[rng.index(self.buffer.len())]
        }
    }
}

/// Functional form of [`WindowHistogram::push`].
pub fn histogram_push(mut h: WindowHistogram, action: usize) -> Result<WindowHistogram> {
    h.push(action)?;
    Ok(h)
}

pub fn histogram_sample(h: &WindowHistogram, rng: &mut RngStream) -> usize {
    h.sample(rng)
}
