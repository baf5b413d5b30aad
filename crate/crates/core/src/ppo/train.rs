use std::collections::VecDeque;
use std::time::Instant;

use crate::envs::{mean_std, Env, ObsNormalizer};
use crate::error::{Error, Result};
use crate::networks::ActorCritic;
use crate::nn::{Adam, AdamConfig, Rng};
use crate::policy::{deterministic_action, sample_action, ActionBounds};
use crate::ppo::loss::LossReport;
use crate::ppo::update::ppo_update;
use crate::ppo::PpoConfig;
use crate::rl::{compute_gae, RolloutBuffer, Transition};
use crate::scalar::{cast_slice, Scalar};

const RETURN_WINDOW: usize = 10;

// Independent random streams derived from the run seed.
const STREAM_ACTIONS: u64 = 1;
const STREAM_ENV: u64 = 2;
const STREAM_SHUFFLE: u64 = 3;
const STREAM_EVAL: u64 = 4;

/// Summary of one collect + update cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    pub env_step: usize,
    /// Mean undiscounted return of the last 10 finished episodes; NaN before
    /// the first one finishes.
    pub mean_return: f64,
    pub episodes_finished: usize,
    /// Mean over this iteration's minibatches.
    pub loss: LossReport,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mean_return: f64,
    pub std_return: f64,
    pub episodes: usize,
    pub deterministic: bool,
    pub returns: Vec<f64>,
}

/// Single-environment PPO run: owns the environment, networks, optimiser
/// and observation statistics.
pub struct Trainer<T> {
    env: Box<dyn Env>,
    pub net: ActorCritic<T>,
    pub normalizer: ObsNormalizer,
    pub optimizer: Adam<T>,
    pub config: PpoConfig,
    bounds: ActionBounds<T>,
    action_rng: Rng,
    env_rng: Rng,
    shuffle_rng: Rng,
    raw_obs: Vec<f64>,
    env_step: usize,
    iteration: usize,
    episode_return: f64,
    recent: VecDeque<f64>,
    episodes_finished: usize,
    started: Instant,
}

fn preprocess<T: Scalar>(normalizer: &ObsNormalizer, enabled: bool, raw: &[f64]) -> Vec<T> {
    if enabled {
        cast_slice(&normalizer.network_input(raw))
    } else {
        cast_slice(raw)
    }
}

impl<T: Scalar> Trainer<T> {
    pub fn new(mut env: Box<dyn Env>, net: ActorCritic<T>, config: PpoConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let desc = env.descriptor().clone();
        if desc.obs_dim != net.obs_dim || desc.act_dim != net.act_dim {
            return Err(Error::InvalidConfig(format!(
                "network dims ({}, {}) do not match environment `{}` ({}, {})",
                net.obs_dim, net.act_dim, desc.name, desc.obs_dim, desc.act_dim
            )));
        }
        let bounds = ActionBounds::new(cast_slice(&desc.action_low), cast_slice(&desc.action_high))?;
        let mut env_rng = Rng::with_stream(seed, STREAM_ENV);
        let raw_obs = env.reset(env_rng.next_u64());
        let optimizer = Adam::new(
            net.params.len(),
            AdamConfig {
                lr: config.lr,
                ..Default::default()
            },
        );
        Ok(Self {
            env,
            normalizer: ObsNormalizer {
                input_scale: config.obs_input_scale,
                ..ObsNormalizer::new(desc.obs_dim)
            },
            optimizer,
            bounds,
            action_rng: Rng::with_stream(seed, STREAM_ACTIONS),
            env_rng,
            shuffle_rng: Rng::with_stream(seed, STREAM_SHUFFLE),
            raw_obs,
            env_step: 0,
            iteration: 0,
            episode_return: 0.0,
            recent: VecDeque::with_capacity(RETURN_WINDOW),
            episodes_finished: 0,
            started: Instant::now(),
            net,
            config,
        })
    }

    pub fn env_step(&self) -> usize {
        self.env_step
    }

    pub fn done(&self) -> bool {
        self.env_step >= self.config.total_steps
    }

    fn observe(&mut self, update: bool) -> Result<Vec<T>> {
        if update && self.config.normalize_obs {
            self.normalizer.update(&self.raw_obs)?;
        }
        Ok(preprocess(&self.normalizer, self.config.normalize_obs, &self.raw_obs))
    }

    /// Runs the stochastic policy for `steps` environment steps.
    pub fn collect(&mut self, steps: usize) -> Result<RolloutBuffer<T>> {
        let mut buffer = RolloutBuffer::new(steps);
        for _ in 0..steps {
            let obs = self.observe(true)?;
            let value = self.net.value(&obs)?;
            let sample = sample_action(&self.net, &obs, &self.bounds, &mut self.action_rng)?;
            let clamped: Vec<f64> = sample.clamped_action.iter().map(|a| a.as_f64()).collect();
            let step = self
                .env
                .step(&clamped)
                .map_err(|e| Error::InvalidConfig(format!("environment step failed: {e}")))?;
            self.env_step += 1;
            self.episode_return += step.reward;
            let truncation_value = if step.truncated {
                let final_obs = preprocess(&self.normalizer, self.config.normalize_obs, &step.obs);
                self.net.value(&final_obs)?
            } else {
                T::zero()
            };
            buffer.push(Transition {
                obs,
                action: sample.action,
                reward: T::lit(step.reward),
                terminated: step.terminated,
                truncated: step.truncated,
                value,
                log_prob: sample.log_prob,
                truncation_value,
            })?;
            if step.terminated || step.truncated {
                if self.recent.len() == RETURN_WINDOW {
                    self.recent.pop_front();
                }
                self.recent.push_back(self.episode_return);
                self.episodes_finished += 1;
                self.episode_return = 0.0;
                self.raw_obs = self.env.reset(self.env_rng.next_u64());
            } else {
                self.raw_obs = step.obs;
            }
        }
        let next = self.observe(false)?;
        buffer.bootstrap_value = self.net.value(&next)?;
        Ok(buffer)
    }

    /// One collect + GAE + update cycle.
    pub fn iterate(&mut self) -> Result<IterationReport> {
        let remaining = self.config.total_steps.saturating_sub(self.env_step);
        let steps = self.config.horizon.min(remaining.max(1));
        let buffer = self.collect(steps)?;
        let adv = compute_gae(&buffer, T::lit(self.config.gamma), T::lit(self.config.lambda))?;
        let reports = ppo_update(
            &mut self.net,
            &buffer,
            &adv,
            &self.config,
            &mut self.optimizer,
            &mut self.shuffle_rng,
        )?;
        self.iteration += 1;
        let mean_return = if self.recent.is_empty() {
            f64::NAN
        } else {
            self.recent.iter().sum::<f64>() / self.recent.len() as f64
        };
        Ok(IterationReport {
            iteration: self.iteration,
            env_step: self.env_step,
            mean_return,
            episodes_finished: self.episodes_finished,
            loss: LossReport::mean(&reports),
            wall_seconds: self.started.elapsed().as_secs_f64(),
        })
    }

    /// Iterates until `total_steps`, handing each report to `sink`.
    pub fn run<F>(&mut self, mut sink: F) -> Result<Vec<IterationReport>>
    where
        F: FnMut(&IterationReport) -> Result<()>,
    {
        let mut history = Vec::new();
        while !self.done() {
            let report = self.iterate()?;
            sink(&report)?;
            history.push(report);
        }
        Ok(history)
    }

    pub fn into_outcome(self, history: Vec<IterationReport>) -> TrainOutcome<T> {
        let mut normalizer = self.normalizer;
        normalizer.frozen = true;
        TrainOutcome {
            net: self.net,
            normalizer,
            history,
        }
    }
}

pub struct TrainOutcome<T> {
    pub net: ActorCritic<T>,
    /// Frozen observation statistics for evaluation.
    pub normalizer: ObsNormalizer,
    pub history: Vec<IterationReport>,
}

/// Trains `net` on `env` until `config.total_steps`; fully determined by `seed`.
pub fn train<T, F>(env: Box<dyn Env>, net: ActorCritic<T>, config: PpoConfig, seed: u64, sink: F) -> Result<TrainOutcome<T>>
where
    T: Scalar,
    F: FnMut(&IterationReport) -> Result<()>,
{
    let mut trainer = Trainer::new(env, net, config, seed)?;
    let history = trainer.run(sink)?;
    Ok(trainer.into_outcome(history))
}

/// Runs `episodes` noise-free episodes with frozen normalisation. Episode
/// start states come from `seed`.
pub fn evaluate<T: Scalar>(
    env: &mut dyn Env,
    net: &ActorCritic<T>,
    normalizer: Option<&ObsNormalizer>,
    episodes: usize,
    seed: u64,
) -> Result<EvalReport> {
    if episodes == 0 {
        return Err(Error::InvalidConfig("evaluation needs at least one episode".into()));
    }
    let desc = env.descriptor().clone();
    let bounds = ActionBounds::new(cast_slice(&desc.action_low), cast_slice(&desc.action_high))?;
    let mut rng = Rng::with_stream(seed, STREAM_EVAL);
    let mut returns = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let mut raw = env.reset(rng.next_u64());
        let mut total = 0.0;
        loop {
            let obs: Vec<T> = match normalizer {
                Some(n) => cast_slice(&n.network_input(&raw)),
                None => cast_slice(&raw),
            };
            let action: Vec<f64> = deterministic_action(net, &obs, &bounds)?
                .iter()
                .map(|a| a.as_f64())
                .collect();
            let step = env.step(&action)?;
            total += step.reward;
            if step.terminated || step.truncated {
                break;
            }
            raw = step.obs;
        }
        returns.push(total);
    }
    let stats = mean_std(&returns, episodes);
    Ok(EvalReport {
        mean_return: stats.mean,
        std_return: stats.std,
        episodes,
        deterministic: true,
        returns,
    })
}
