//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use kanppo::nn::Rng;
use kanppo::rl::{RolloutBuffer, Transition};

/// Textbook recursive Cox–de Boor definition of B_{i,k}(x) on the full knot
/// vector with half-open intervals.
pub fn naive_basis(knots: &[f64], i: usize, k: usize, x: f64) -> f64 {
    if k == 0 {
        return if knots[i] <= x && x < knots[i + 1] { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    let d1 = knots[i + k] - knots[i];
    if d1 != 0.0 {
        v += (x - knots[i]) / d1 * naive_basis(knots, i, k - 1, x);
    }
    let d2 = knots[i + k + 1] - knots[i + 1];
    if d2 != 0.0 {
        v += (knots[i + k + 1] - x) / d2 * naive_basis(knots, i + 1, k - 1, x);
    }
    v
}

/// Uniform knots extended `k` steps beyond `[lo, hi]`, built from scratch.
pub fn naive_knots(k: usize, g: usize, lo: f64, hi: f64) -> Vec<f64> {
    let h = (hi - lo) / g as f64;
    (0..g + 2 * k + 1).map(|j| lo + (j as f64 - k as f64) * h).collect()
}

/// All g + k basis values at `x` in `[lo, hi]`; `x == hi` is taken as the
/// limit from the left.
pub fn naive_basis_all(k: usize, g: usize, lo: f64, hi: f64, x: f64) -> Vec<f64> {
    let knots = naive_knots(k, g, lo, hi);
    let x = if x >= hi { hi - 1e-14 * (hi - lo) } else { x };
    (0..g + k).map(|i| naive_basis(&knots, i, k, x)).collect()
}

/// Advantages as the explicit discounted sum of TD errors, truncated at the
/// end of each episode and at the buffer edge.
pub fn brute_force_gae(buffer: &RolloutBuffer<f64>, gamma: f64, lambda: f64) -> Vec<f64> {
    let ts = buffer.transitions();
    let n = ts.len();
    let delta: Vec<f64> = (0..n)
        .map(|t| {
            let tr = &ts[t];
            let next = if tr.terminated {
                0.0
            } else if tr.truncated {
                tr.truncation_value
            } else if t + 1 < n {
                ts[t + 1].value
            } else {
                buffer.bootstrap_value
            };
            tr.reward + gamma * next - tr.value
        })
        .collect();
    (0..n)
        .map(|t| {
            let mut sum = 0.0;
            for l in 0..n - t {
                sum += (gamma * lambda).powi(l as i32) * delta[t + l];
                let tr = &ts[t + l];
                if tr.terminated || tr.truncated {
                    break;
                }
            }
            sum
        })
        .collect()
}

/// Random rollout with roughly one episode end per `1 / p_end` steps.
pub fn random_buffer(rng: &mut Rng, len: usize, p_end: f64) -> RolloutBuffer<f64> {
    let transitions = (0..len)
        .map(|_| {
            let end = rng.uniform(0.0, 1.0) < p_end;
            let terminated = end && rng.uniform(0.0, 1.0) < 0.5;
            Transition {
                obs: vec![rng.normal()],
                action: vec![rng.normal()],
                reward: rng.uniform(-2.0, 2.0),
                terminated,
                truncated: end && !terminated,
                value: rng.uniform(-5.0, 5.0),
                log_prob: rng.normal(),
                truncation_value: rng.uniform(-5.0, 5.0),
            }
        })
        .collect();
    RolloutBuffer::from_transitions(transitions, rng.uniform(-5.0, 5.0))
}

/// `n` random samples around the current policy: old log-probabilities are
/// perturbed so ratios spread on both sides of the clip range.
pub fn random_samples(
    net: &kanppo::ActorCritic,
    rng: &mut Rng,
    n: usize,
) -> Vec<kanppo::ppo::Sample<f64>> {
    (0..n)
        .map(|_| {
            let obs: Vec<f64> = (0..net.obs_dim).map(|_| rng.uniform(-0.9, 0.9)).collect();
            let action: Vec<f64> = (0..net.act_dim).map(|_| rng.normal()).collect();
            let logp = kanppo::policy::log_prob(net, &obs, &action).unwrap();
            kanppo::ppo::Sample {
                obs,
                action,
                log_prob_old: logp + rng.uniform(-0.4, 0.4),
                advantage: rng.normal(),
                value_target: rng.normal(),
            }
        })
        .collect()
}

/// Adds N(0, scale²) noise to every parameter so that output layers and
/// log-std are not at their special initial values.
pub fn jitter(net: &mut kanppo::ActorCritic, rng: &mut Rng, scale: f64) {
    for v in net.params.values_mut() {
        *v += scale * rng.normal();
    }
}
