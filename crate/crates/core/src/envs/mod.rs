//! Environment contract, the built-in continuous-control tasks, observation
//! normalisation and the random-policy baseline.

mod cartpole;
mod normalizer;
mod pendulum;
mod point_reacher;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Rng;

pub use cartpole::CartPoleContinuous;
pub use normalizer::ObsNormalizer;
pub use pendulum::{PendulumState, PendulumSwingup};
pub use point_reacher::PointReacher;

/// Integration step shared by every built-in task.
pub const DT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvDescriptor {
    pub name: String,
    pub obs_dim: usize,
    pub act_dim: usize,
    pub action_low: Vec<f64>,
    pub action_high: Vec<f64>,
    pub max_episode_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub terminated: bool,
    /// Set exactly when the step limit is hit without termination.
    pub truncated: bool,
}

pub trait Env: Send {
    fn descriptor(&self) -> &EnvDescriptor;

    /// Starts a new episode from a state drawn deterministically from `seed`.
    fn reset(&mut self, seed: u64) -> Vec<f64>;

    /// Advances one step. The action must lie within the declared bounds.
    fn step(&mut self, action: &[f64]) -> Result<StepResult>;
}

pub(crate) fn check_action(desc: &EnvDescriptor, action: &[f64]) -> Result<()> {
    crate::error::check_len("action", desc.act_dim, action.len())?;
    for (index, ((&a, &low), &high)) in action.iter().zip(&desc.action_low).zip(&desc.action_high).enumerate() {
        if !(a >= low && a <= high) {
            return Err(Error::ActionOutOfBounds {
                index,
                value: a,
                low,
                high,
            });
        }
    }
    Ok(())
}

/// Step counter shared by the tasks: flags truncation at the limit.
#[derive(Debug, Clone, Default)]
pub(crate) struct EpisodeClock {
    steps: usize,
    done: bool,
}

impl EpisodeClock {
    pub(crate) fn reset(&mut self) {
        self.steps = 0;
        self.done = false;
    }

    pub(crate) fn begin_step(&self) -> Result<()> {
        if self.done {
            Err(Error::EpisodeOver)
        } else {
            Ok(())
        }
    }

    /// Returns the truncation flag for a step that did or did not terminate.
    pub(crate) fn finish_step(&mut self, terminated: bool, limit: usize) -> bool {
        self.steps += 1;
        let truncated = !terminated && self.steps >= limit;
        self.done = terminated || truncated;
        truncated
    }
}

pub const ENV_NAMES: [&str; 3] = ["point-reacher", "pendulum-swingup", "cartpole-continuous"];

/// Builds a built-in task by registry name.
pub fn make_env(name: &str) -> Result<Box<dyn Env>> {
    match name {
        "point-reacher" => Ok(Box::new(PointReacher::new())),
        "pendulum-swingup" => Ok(Box::new(PendulumSwingup::new())),
        "cartpole-continuous" => Ok(Box::new(CartPoleContinuous::new())),
        other => Err(Error::UnknownEnv(other.to_owned())),
    }
}

/// Observation and action sizes of an environment that is only counted,
/// never simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvDims {
    pub name: &'static str,
    pub obs_dim: usize,
    pub act_dim: usize,
}

impl EnvDims {
    pub fn key(&self) -> String {
        format!("{}:{}:{}", self.name, self.obs_dim, self.act_dim)
    }
}

/// MuJoCo locomotion dimension pairs used for parameter tables.
pub const MUJOCO_DIMS: [EnvDims; 6] = [
    EnvDims { name: "halfcheetah", obs_dim: 17, act_dim: 6 },
    EnvDims { name: "walker2d", obs_dim: 17, act_dim: 6 },
    EnvDims { name: "hopper", obs_dim: 11, act_dim: 3 },
    EnvDims { name: "invertedpendulum", obs_dim: 4, act_dim: 1 },
    EnvDims { name: "swimmer", obs_dim: 8, act_dim: 2 },
    EnvDims { name: "pusher", obs_dim: 23, act_dim: 7 },
];

/// Resolves `name`, `name:obs:act` or `obs:act` to dimensions. Built-in
/// task names resolve to their real sizes.
pub fn lookup_dims(key: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = key.split(':').collect();
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::UnknownEnv(key.to_owned()));
    let dims = match parts.as_slice() {
        [name] => {
            if let Some(d) = MUJOCO_DIMS.iter().find(|d| d.name == *name) {
                (d.obs_dim, d.act_dim)
            } else {
                let env = make_env(name)?;
                (env.descriptor().obs_dim, env.descriptor().act_dim)
            }
        }
        [obs, act] => (parse(obs)?, parse(act)?),
        [_, obs, act] => (parse(obs)?, parse(act)?),
        _ => return Err(Error::UnknownEnv(key.to_owned())),
    };
    if dims.0 == 0 || dims.1 == 0 {
        return Err(Error::UnknownEnv(key.to_owned()));
    }
    Ok(dims)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineStats {
    pub mean: f64,
    pub std: f64,
    pub episodes: usize,
}

/// Mean and (population) std of undiscounted returns under uniformly random
/// actions.
pub fn random_policy_baseline(env: &mut dyn Env, episodes: usize, rng: &mut Rng) -> Result<BaselineStats> {
    if episodes == 0 {
        return Err(Error::InvalidConfig("baseline needs at least one episode".into()));
    }
    let desc = env.descriptor().clone();
    let mut returns = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        env.reset(rng.next_u64());
        let mut total = 0.0;
        loop {
            let action: Vec<f64> = desc
                .action_low
                .iter()
                .zip(&desc.action_high)
                .map(|(&l, &h)| rng.uniform(l, h))
                .collect();
            let r = env.step(&action)?;
            total += r.reward;
            if r.terminated || r.truncated {
                break;
            }
        }
        returns.push(total);
    }
    Ok(mean_std(&returns, episodes))
}

pub fn mean_std(xs: &[f64], episodes: usize) -> BaselineStats {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    BaselineStats {
        mean,
        std: var.sqrt(),
        episodes,
    }
}
