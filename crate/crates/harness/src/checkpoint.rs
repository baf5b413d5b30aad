use std::path::Path;

use kanppo::envs::ObsNormalizer;
use kanppo::networks::NetworkSnapshot;
use kanppo::networks::ActorCritic;
use kanppo::Scalar;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::io::write_atomic;

pub const FORMAT: &str = "kanppo-checkpoint";
pub const VERSION: u32 = 1;

/// Trained networks plus everything needed to evaluate them. Stored as JSON;
/// floats round-trip exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub env: String,
    pub seed: u64,
    pub env_step: usize,
    pub network: NetworkSnapshot,
    pub normalizer: Option<ObsNormalizer>,
}

impl Checkpoint {
    pub fn new<T: Scalar>(
        env: &str,
        seed: u64,
        env_step: usize,
        net: &ActorCritic<T>,
        normalizer: Option<ObsNormalizer>,
    ) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
            env: env.into(),
            seed,
            env_step,
            network: net.snapshot(),
            normalizer,
        }
    }

    pub fn network<T: Scalar>(&self) -> Result<ActorCritic<T>> {
        Ok(ActorCritic::from_snapshot(&self.network)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_vec(self).map_err(|e| HarnessError::format(path, e))?;
        write_atomic(path, &text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
        let ckpt: Self = serde_json::from_slice(&bytes).map_err(|e| HarnessError::format(path, e))?;
        if ckpt.format != FORMAT {
            return Err(HarnessError::format(path, "not a checkpoint file"));
        }
        if ckpt.version != VERSION {
            return Err(HarnessError::format(
                path,
                format!("unsupported checkpoint version {}", ckpt.version),
            ));
        }
        Ok(ckpt)
    }
}
