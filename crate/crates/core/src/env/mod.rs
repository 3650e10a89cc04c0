//! Reward models, problem instances and instance files.

mod instance_file;
mod model;
mod presets;

pub use instance_file::{InstanceFile, INSTANCE_FORMAT_VERSION};
pub use model::{FlipMode, Observation, RewardModel, StepOutcome, Variant};
pub use presets::{
    graded_observabilities, preset_fixed_2x2, preset_k_local_optima, preset_local_optima, preset_random,
    InstancePreset, RandomChannel, DEFAULT_C,
};
