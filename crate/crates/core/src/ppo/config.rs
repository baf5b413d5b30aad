use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpoConfig {
    /// clip range ε
    pub epsilon: f64,
    /// value-loss coefficient
    pub c1: f64,
    /// entropy-bonus coefficient
    pub c2: f64,
    pub lr: f64,
    /// K
    pub epochs: usize,
    /// M
    pub minibatch: usize,
    /// T
    pub horizon: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub total_steps: usize,
    pub eval_episodes: usize,
    pub normalize_advantages: bool,
    pub normalize_obs: bool,
    /// Normalised observations are divided by this before reaching the networks.
    pub obs_input_scale: f64,
    /// Global gradient-norm clip; disabled when `None`.
    pub max_grad_norm: Option<f64>,
    pub log_std_min: f64,
    pub log_std_max: f64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.2,
            c1: 0.5,
            c2: 0.0,
            lr: 3e-4,
            epochs: 10,
            minibatch: 64,
            horizon: 2048,
            gamma: 0.99,
            lambda: 0.95,
            total_steps: 100_000,
            eval_episodes: 100,
            normalize_advantages: true,
            normalize_obs: true,
            obs_input_scale: 1.0,
            max_grad_norm: None,
            log_std_min: -5.0,
            log_std_max: 2.0,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.lr > 0.0) {
            return bad("lr must be positive");
        }
        if self.epochs == 0 || self.minibatch == 0 || self.horizon == 0 || self.total_steps == 0 {
            return bad("epochs, minibatch, horizon and total_steps must be at least 1");
        }
        if self.minibatch > self.horizon {
            return bad("minibatch must not exceed horizon");
        }
        if !(0.0..=1.0).contains(&self.gamma) || !(0.0..=1.0).contains(&self.lambda) {
            return bad("gamma and lambda must lie in [0, 1]");
        }
        if !(self.c1 >= 0.0) || !(self.c2 >= 0.0) {
            return bad("loss coefficients must be non-negative");
        }
        if !(self.obs_input_scale > 0.0) {
            return bad("obs_input_scale must be positive");
        }
        if self.max_grad_norm.is_some_and(|m| !(m > 0.0)) {
            return bad("max_grad_norm must be positive");
        }
        if !(self.log_std_min < self.log_std_max) {
            return bad("log_std_min must be below log_std_max");
        }
        Ok(())
    }
}
