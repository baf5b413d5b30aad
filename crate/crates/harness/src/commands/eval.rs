use std::path::Path;

use kanppo::envs::make_env;
use kanppo::ppo::{evaluate, EvalReport};
use kanppo::ActorCritic;

use crate::checkpoint::Checkpoint;
use crate::error::Result;

/// Noise-free evaluation of a saved checkpoint on its own environment.
pub fn cmd_eval(path: &Path, episodes: usize, seed: u64) -> Result<EvalReport> {
    let ckpt = Checkpoint::load(path)?;
    let net: ActorCritic = ckpt.network()?;
    let mut env = make_env(&ckpt.env)?;
    Ok(evaluate(env.as_mut(), &net, ckpt.normalizer.as_ref(), episodes, seed)?)
}
