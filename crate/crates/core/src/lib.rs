//! Decentralized multi-agent bandits with coupled rewards and partial reward
//! observability.
//!
//! Several agents each pick one coordinate of a team action; the team
//! receives one shared Bernoulli (or Gaussian) reward, and each agent sees it
//! through its own noisy channel. The crate provides the partner-aware UCB
//! strategies and their baselines ([`agents`]), reward models and instance
//! presets ([`env`]), a seeded batch runner with pseudo-regret accounting
//! ([`runner`]) and a human-in-the-loop session engine ([`session`]).
//!
//! All randomness flows through [`RngStream`], a ChaCha8 generator with named
//! substreams, so every trace is reproducible from its seed.

pub mod agents;
pub mod env;
mod error;
pub mod rng;
pub mod runner;
pub mod session;
pub mod space;
pub mod stats;
pub mod window;

pub use error::{Error, Result};
pub use rng::{run_seed, RngStream, GENERATOR_VERSION};
pub use space::{ActionSpace, TeamAction};
pub use stats::{argmax_tiebreak, ucb_index, update_mean, ArmStats, ConfidenceParams};
pub use window::{histogram_push, histogram_sample, WindowHistogram};
