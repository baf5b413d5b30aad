//! Rollout storage, temporal-difference errors, generalized advantage
//! estimation and minibatching.

use crate::error::{Error, Result};
use crate::nn::Rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<T> {
    pub obs: Vec<T>,
    /// Pre-clamp action.
    pub action: Vec<T>,
    pub reward: T,
    pub terminated: bool,
    pub truncated: bool,
    /// V(s_t) at collection time.
    pub value: T,
    pub log_prob: T,
    /// V of the final observation when `truncated`; ignored otherwise.
    pub truncation_value: T,
}

/// Fixed-capacity on-policy trajectory store.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutBuffer<T> {
    capacity: usize,
    transitions: Vec<Transition<T>>,
    /// V(s_T) of the observation following the last stored step.
    pub bootstrap_value: T,
}

impl<T: Scalar> RolloutBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            transitions: Vec::with_capacity(capacity),
            bootstrap_value: T::zero(),
        }
    }

    pub fn from_transitions(transitions: Vec<Transition<T>>, bootstrap_value: T) -> Self {
        Self {
            capacity: transitions.len(),
            transitions,
            bootstrap_value,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.transitions.len() == self.capacity
    }

    pub fn push(&mut self, t: Transition<T>) -> Result<()> {
        if self.is_full() {
            return Err(Error::InvalidConfig(format!("rollout buffer full ({})", self.capacity)));
        }
        if !t.reward.is_finite() {
            return Err(Error::NonFinite("reward".into()));
        }
        self.transitions.push(t);
        Ok(())
    }

    pub fn transitions(&self) -> &[Transition<T>] {
        &self.transitions
    }

    pub fn clear(&mut self) {
        self.transitions.clear();
        self.bootstrap_value = T::zero();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageBatch<T> {
    pub advantages: Vec<T>,
    /// Value targets: advantage + V(s_t).
    pub returns: Vec<T>,
    pub gamma: T,
    pub lambda: T,
}

/// δ = r + γ·v_next·(1 − terminal) − v.
#[inline]
pub fn td_error<T: Scalar>(reward: T, value: T, next_value: T, terminal: bool, gamma: T) -> T {
    let bootstrap = if terminal { T::zero() } else { gamma * next_value };
    reward + bootstrap - value
}

/// Backward GAE recursion over the buffer.
///
/// Termination stops bootstrapping; truncation bootstraps from
/// `truncation_value`. Either one ends the episode, so no advantage flows
/// across it. The step after the last stored one is valued at
/// `bootstrap_value`.
pub fn compute_gae<T: Scalar>(buffer: &RolloutBuffer<T>, gamma: T, lambda: T) -> Result<AdvantageBatch<T>> {
    let ts = buffer.transitions();
    if ts.is_empty() {
        return Err(Error::Empty("rollout buffer"));
    }
    let n = ts.len();
    let mut advantages = vec![T::zero(); n];
    let mut next_adv = T::zero();
    for t in (0..n).rev() {
        let tr = &ts[t];
        let episode_end = tr.terminated || tr.truncated;
        let next_value = if tr.truncated {
            tr.truncation_value
        } else if t + 1 < n {
            ts[t + 1].value
        } else {
            buffer.bootstrap_value
        };
        let delta = td_error(tr.reward, tr.value, next_value, tr.terminated, gamma);
        let carry = if episode_end { T::zero() } else { gamma * lambda * next_adv };
        advantages[t] = delta + carry;
        next_adv = advantages[t];
    }
    let returns = advantages.iter().zip(ts).map(|(&a, tr)| a + tr.value).collect();
    Ok(AdvantageBatch {
        advantages,
        returns,
        gamma,
        lambda,
    })
}

/// Standardises advantages to zero mean and unit (population) variance.
/// Constant advantages become zeros. Returns are left untouched.
pub fn normalize_advantages<T: Scalar>(batch: &mut AdvantageBatch<T>) {
    let xs = &mut batch.advantages;
    if xs.is_empty() {
        return;
    }
    let n = T::lit(xs.len() as f64);
    let mean = xs.iter().copied().sum::<T>() / n;
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n;
    let std = var.sqrt();
    if std <= T::lit(1e-12) * mean.abs().max(T::one()) {
        xs.iter_mut().for_each(|x| *x = T::zero());
        return;
    }
    let eps = T::lit(1e-8);
    let denom = (var + eps * eps).sqrt();
    xs.iter_mut().for_each(|x| *x = (*x - mean) / denom);
}

/// One epoch of shuffled minibatches covering `0..len` exactly once.
pub fn minibatch_iter(len: usize, batch_size: usize, rng: &mut Rng) -> Result<Vec<Vec<usize>>> {
    if batch_size == 0 || batch_size > len {
        return Err(Error::InvalidConfig(format!(
            "minibatch size {batch_size} must be in 1..={len}"
        )));
    }
    let mut idx: Vec<usize> = (0..len).collect();
    rng.shuffle(&mut idx);
    Ok(idx.chunks(batch_size).map(<[usize]>::to_vec).collect())
}
