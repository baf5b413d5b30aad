//! Diagonal-Gaussian policy head with a state-independent log standard
//! deviation.

use crate::error::{check_len, Error, Result};
use crate::networks::ActorCritic;
use crate::nn::Rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ActionBounds<T> {
    pub low: Vec<T>,
    pub high: Vec<T>,
}

impl<T: Scalar> ActionBounds<T> {
    pub fn new(low: Vec<T>, high: Vec<T>) -> Result<Self> {
        check_len("action bounds", low.len(), high.len())?;
        if low.iter().zip(&high).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidConfig("action bounds need low < high".into()));
        }
        Ok(Self { low, high })
    }

    pub fn symmetric(dim: usize, limit: T) -> Self {
        Self {
            low: vec![-limit; dim],
            high: vec![limit; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.low.len()
    }

    pub fn clamp(&self, action: &[T]) -> Vec<T> {
        action
            .iter()
            .zip(self.low.iter().zip(&self.high))
            .map(|(&a, (&l, &h))| a.max(l).min(h))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSample<T> {
    /// Pre-clamp action; the log-probability refers to this.
    pub action: Vec<T>,
    pub clamped_action: Vec<T>,
    pub log_prob: T,
}

fn half_ln_2pi<T: Scalar>() -> T {
    T::lit(0.5) * (T::lit(2.0) * T::PI()).ln()
}

pub fn gaussian_log_prob<T: Scalar>(mean: &[T], log_std: &[T], action: &[T]) -> T {
    let half = T::lit(0.5);
    mean.iter()
        .zip(log_std)
        .zip(action)
        .map(|((&mu, &ls), &a)| {
            let z = (a - mu) / ls.exp();
            -half_ln_2pi::<T>() - ls - half * z * z
        })
        .sum()
}

/// Gradients of the log-density with respect to the mean and the log-std.
pub fn gaussian_log_prob_grads<T: Scalar>(mean: &[T], log_std: &[T], action: &[T]) -> (Vec<T>, Vec<T>) {
    let mut d_mean = Vec::with_capacity(mean.len());
    let mut d_log_std = Vec::with_capacity(mean.len());
    for ((&mu, &ls), &a) in mean.iter().zip(log_std).zip(action) {
        let sigma = ls.exp();
        let z = (a - mu) / sigma;
        d_mean.push(z / sigma);
        d_log_std.push(z * z - T::one());
    }
    (d_mean, d_log_std)
}

/// Σ_d (½ ln(2πe) + log σ_d).
pub fn gaussian_entropy<T: Scalar>(log_std: &[T]) -> T {
    let c = half_ln_2pi::<T>() + T::lit(0.5);
    log_std.iter().map(|&ls| c + ls).sum()
}

fn finite_mean<T: Scalar>(net: &ActorCritic<T>, obs: &[T]) -> Result<Vec<T>> {
    let mean = net.actor_mean(obs)?;
    if mean.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFinite(format!("actor mean ({} network)", net.spec.arch)));
    }
    Ok(mean)
}

/// Samples with caller-provided standard-normal noise `z`.
pub fn sample_action_with_noise<T: Scalar>(
    net: &ActorCritic<T>,
    obs: &[T],
    bounds: &ActionBounds<T>,
    z: &[T],
) -> Result<ActionSample<T>> {
    check_len("action noise", net.act_dim, z.len())?;
    check_len("action bounds", net.act_dim, bounds.dim())?;
    let mean = finite_mean(net, obs)?;
    let log_std = net.log_std();
    let action: Vec<T> = mean
        .iter()
        .zip(log_std)
        .zip(z)
        .map(|((&mu, &ls), &zd)| mu + ls.exp() * zd)
        .collect();
    let half = T::lit(0.5);
    let log_prob = log_std
        .iter()
        .zip(z)
        .map(|(&ls, &zd)| -half_ln_2pi::<T>() - ls - half * zd * zd)
        .sum();
    Ok(ActionSample {
        clamped_action: bounds.clamp(&action),
        action,
        log_prob,
    })
}

pub fn sample_action<T: Scalar>(
    net: &ActorCritic<T>,
    obs: &[T],
    bounds: &ActionBounds<T>,
    rng: &mut Rng,
) -> Result<ActionSample<T>> {
    let z: Vec<T> = (0..net.act_dim).map(|_| T::lit(rng.normal())).collect();
    sample_action_with_noise(net, obs, bounds, &z)
}

pub fn log_prob<T: Scalar>(net: &ActorCritic<T>, obs: &[T], action: &[T]) -> Result<T> {
    check_len("action", net.act_dim, action.len())?;
    let mean = net.actor_mean(obs)?;
    Ok(gaussian_log_prob(&mean, net.log_std(), action))
}

pub fn entropy<T: Scalar>(net: &ActorCritic<T>) -> T {
    gaussian_entropy(net.log_std())
}

/// Clamped mean action; consumes no randomness.
pub fn deterministic_action<T: Scalar>(net: &ActorCritic<T>, obs: &[T], bounds: &ActionBounds<T>) -> Result<Vec<T>> {
    Ok(bounds.clamp(&finite_mean(net, obs)?))
}
