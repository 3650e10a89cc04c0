//! Versioned JSON instance files.
//!
//! ```json
//! {"v":1,"variant":"masked_bernoulli","shape":[2,2],"means":[0.8,0.4,0.2,0.6],
//!  "observabilities":[1.0,0.5],"seed":null}
//! ```
//!
//! Means are row-major. Floats are written in shortest round-trip form, so a
//! store/load cycle reproduces the model bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{FlipMode, RewardModel, Variant};
use crate::error::{Error, Result};
use crate::space::ActionSpace;

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub v: u32,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip_mode: Option<FlipMode>,
    pub shape: Vec<usize>,
    pub means: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observabilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub true_stds: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noise_stds: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn from_model(model: &RewardModel, seed: Option<u64>) -> Self {
        Self {
            v: INSTANCE_FORMAT_VERSION,
            variant: model.variant(),
            flip_mode: (model.variant() == Variant::Flipped).then_some(model.flip_mode()),
            shape: model.space().sizes().to_vec(),
            means: model.means().to_vec(),
            observabilities: model.observabilities().to_vec(),
            true_stds: model.true_stds().to_vec(),
            noise_stds: model.noise_stds().to_vec(),
            seed,
        }
    }

    pub fn to_model(&self) -> Result<RewardModel> {
        if self.v != INSTANCE_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.v));
        }
        let space = ActionSpace::new(self.shape.clone())?;
        match self.variant {
            Variant::MaskedBernoulli => {
                RewardModel::masked_bernoulli(space, self.means.clone(), self.observabilities.clone())
            }
            Variant::Flipped => RewardModel::flipped(
                space,
                self.means.clone(),
                self.observabilities.clone(),
                self.flip_mode.unwrap_or_default(),
            ),
            Variant::Gaussian => RewardModel::gaussian(
                space,
                self.means.clone(),
                self.true_stds.clone(),
                self.noise_stds.clone(),
            ),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}
