use crate::error::{check_len, Error, Result};
use crate::networks::{ActorCritic, StackCache};
use crate::nn::{ParamSlice, ParamStore};
use crate::policy::{gaussian_entropy, gaussian_log_prob, gaussian_log_prob_grads};
use crate::scalar::Scalar;

const RATIO_EXP_LIMIT: f64 = 20.0;

/// exp(logp_new − logp_old) with the exponent clamped to ±20.
#[inline]
pub fn ratio<T: Scalar>(logp_new: T, logp_old: T) -> T {
    let lim = T::lit(RATIO_EXP_LIMIT);
    (logp_new - logp_old).max(-lim).min(lim).exp()
}

/// min(r·A, clip(r, 1−ε, 1+ε)·A)
#[inline]
pub fn clip_objective<T: Scalar>(r: T, adv: T, epsilon: T) -> T {
    let clipped = r.max(T::one() - epsilon).min(T::one() + epsilon);
    (r * adv).min(clipped * adv)
}

/// Batch mean of log π · A (vanilla policy-gradient objective).
pub fn l_pg<T: Scalar>(logp: &[T], adv: &[T]) -> T {
    if logp.is_empty() {
        return T::zero();
    }
    logp.iter().zip(adv).map(|(&l, &a)| l * a).sum::<T>() / T::lit(logp.len() as f64)
}

/// ∂ l_pg / ∂ log π_i = A_i / n.
pub fn l_pg_grad<T: Scalar>(adv: &[T]) -> Vec<T> {
    let n = T::lit(adv.len().max(1) as f64);
    adv.iter().map(|&a| a / n).collect()
}

/// One training example, frozen at collection time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub obs: Vec<T>,
    pub action: Vec<T>,
    pub log_prob_old: T,
    pub advantage: T,
    pub value_target: T,
}

/// Components of the minimised objective
/// `−l_clip + c1·l_vf − c2·entropy`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossReport {
    pub l_clip: f64,
    pub l_vf: f64,
    pub entropy: f64,
    pub total_loss: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

impl LossReport {
    pub fn mean(reports: &[LossReport]) -> LossReport {
        if reports.is_empty() {
            return LossReport::default();
        }
        let n = reports.len() as f64;
        let sum = |f: fn(&LossReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        LossReport {
            l_clip: sum(|r| r.l_clip),
            l_vf: sum(|r| r.l_vf),
            entropy: sum(|r| r.entropy),
            total_loss: sum(|r| r.total_loss),
            approx_kl: sum(|r| r.approx_kl),
            clip_fraction: sum(|r| r.clip_fraction),
        }
    }
}

struct SampleTerms<T> {
    surrogate: T,
    /// ∂ surrogate / ∂ log π_new
    d_surrogate: T,
    log_ratio: T,
    ratio: T,
}

fn sample_terms<T: Scalar>(logp: T, s: &Sample<T>, epsilon: T) -> SampleTerms<T> {
    let log_ratio = logp - s.log_prob_old;
    let r = ratio(logp, s.log_prob_old);
    let lim = T::lit(RATIO_EXP_LIMIT);
    let unclipped = r * s.advantage;
    let clipped = r.max(T::one() - epsilon).min(T::one() + epsilon) * s.advantage;
    let (surrogate, d_surrogate) = if unclipped <= clipped {
        let dr = if log_ratio.abs() < lim { r } else { T::zero() };
        (unclipped, s.advantage * dr)
    } else {
        (clipped, T::zero())
    };
    SampleTerms {
        surrogate,
        d_surrogate,
        log_ratio,
        ratio: r,
    }
}

#[allow(clippy::too_many_arguments)]
fn report<T: Scalar>(
    n: usize,
    surrogate_sum: T,
    vf_sum: T,
    entropy: T,
    kl_sum: T,
    clipped: usize,
    c1: T,
    c2: T,
) -> Result<(T, LossReport)> {
    let nt = T::lit(n as f64);
    let l_clip = surrogate_sum / nt;
    let l_vf = vf_sum / nt;
    let total = -l_clip + c1 * l_vf - c2 * entropy;
    let rep = LossReport {
        l_clip: l_clip.as_f64(),
        l_vf: l_vf.as_f64(),
        entropy: entropy.as_f64(),
        total_loss: total.as_f64(),
        approx_kl: (kl_sum / nt).as_f64(),
        clip_fraction: clipped as f64 / n as f64,
    };
    if !total.is_finite() {
        return Err(Error::NonFinite(format!(
            "total loss (l_clip={}, l_vf={}, entropy={})",
            rep.l_clip, rep.l_vf, rep.entropy
        )));
    }
    Ok((total, rep))
}

/// Loss value under `params`, without touching gradients.
pub fn combined_loss_value<T: Scalar>(
    net: &ActorCritic<T>,
    params: &ParamStore<T>,
    samples: &[Sample<T>],
    config: &super::PpoConfig,
) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::Empty("minibatch"));
    }
    let means = actor_means(net, params, samples)?;
    let values = critic_values(net, params, samples)?;
    loss_from_outputs(&means, &values, params.get(net.log_std), samples, config)
}

fn actor_means<T: Scalar>(net: &ActorCritic<T>, params: &ParamStore<T>, samples: &[Sample<T>]) -> Result<Vec<Vec<T>>> {
    let mut cache = StackCache::default();
    samples.iter().map(|s| net.actor_mean_with(params, &s.obs, &mut cache)).collect()
}

fn critic_values<T: Scalar>(net: &ActorCritic<T>, params: &ParamStore<T>, samples: &[Sample<T>]) -> Result<Vec<T>> {
    let mut cache = StackCache::default();
    samples.iter().map(|s| net.value_with(params, &s.obs, &mut cache)).collect()
}

fn loss_from_outputs<T: Scalar>(
    means: &[Vec<T>],
    values: &[T],
    log_std: &[T],
    samples: &[Sample<T>],
    config: &super::PpoConfig,
) -> Result<T> {
    let eps = T::lit(config.epsilon);
    let (mut surr, mut vf, mut kl, mut clipped) = (T::zero(), T::zero(), T::zero(), 0);
    for ((s, mean), &v) in samples.iter().zip(means).zip(values) {
        let terms = sample_terms(gaussian_log_prob(mean, log_std, &s.action), s, eps);
        surr += terms.surrogate;
        vf += (v - s.value_target).powi(2);
        kl += (terms.ratio - T::one()) - terms.log_ratio;
        clipped += usize::from((terms.ratio - T::one()).abs() > eps);
    }
    let entropy = gaussian_entropy(log_std);
    report(samples.len(), surr, vf, entropy, kl, clipped, T::lit(config.c1), T::lit(config.c2)).map(|(t, _)| t)
}

/// Repeated [`combined_loss_value`] evaluations at parameter vectors that
/// differ from `net.params` in a few entries, as in finite differencing.
///
/// Actor and critic outputs at the base parameters are kept; a sub-network is
/// re-run only when one of its parameters differs. Results are bitwise equal
/// to [`combined_loss_value`].
pub struct LossProbe<'a, T> {
    net: &'a ActorCritic<T>,
    samples: &'a [Sample<T>],
    config: &'a super::PpoConfig,
    actor_slices: Vec<ParamSlice>,
    critic_slices: Vec<ParamSlice>,
    means: Vec<Vec<T>>,
    values: Vec<T>,
}

impl<'a, T: Scalar> LossProbe<'a, T> {
    pub fn new(net: &'a ActorCritic<T>, samples: &'a [Sample<T>], config: &'a super::PpoConfig) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("minibatch"));
        }
        Ok(Self {
            net,
            samples,
            config,
            actor_slices: net.actor.param_slices(),
            critic_slices: net.critic.param_slices(),
            means: actor_means(net, &net.params, samples)?,
            values: critic_values(net, &net.params, samples)?,
        })
    }

    fn differs(&self, params: &ParamStore<T>, slices: &[ParamSlice]) -> bool {
        slices.iter().any(|&s| params.get(s) != self.net.params.get(s))
    }

    pub fn value(&self, params: &ParamStore<T>) -> Result<T> {
        check_len("probe parameters", self.net.params.len(), params.len())?;
        let fresh_means;
        let means = if self.differs(params, &self.actor_slices) {
            fresh_means = actor_means(self.net, params, self.samples)?;
            &fresh_means
        } else {
            &self.means
        };
        let fresh_values;
        let values = if self.differs(params, &self.critic_slices) {
            fresh_values = critic_values(self.net, params, self.samples)?;
            &fresh_values
        } else {
            &self.values
        };
        loss_from_outputs(means, values, params.get(self.net.log_std), self.samples, self.config)
    }
}

/// Evaluates the combined objective on a minibatch and accumulates its
/// gradient into `net.params` (actor, critic and log-std).
pub fn combined_loss<T: Scalar>(
    net: &mut ActorCritic<T>,
    samples: &[Sample<T>],
    config: &super::PpoConfig,
) -> Result<LossReport> {
    if samples.is_empty() {
        return Err(Error::Empty("minibatch"));
    }
    let n = T::lit(samples.len() as f64);
    let eps = T::lit(config.epsilon);
    let c1 = T::lit(config.c1);
    let c2 = T::lit(config.c2);
    let log_std = net.log_std().to_vec();
    let mut d_log_std = vec![T::zero(); net.act_dim];
    let (mut ac, mut cc) = (StackCache::default(), StackCache::default());
    let (mut surr, mut vf, mut kl, mut clipped) = (T::zero(), T::zero(), T::zero(), 0);
    for s in samples {
        let mean = net.actor.forward(&net.params, &s.obs, &mut ac)?;
        let v = net.critic.forward(&net.params, &s.obs, &mut cc)?[0];
        let logp = gaussian_log_prob(&mean, &log_std, &s.action);
        let terms = sample_terms(logp, s, eps);
        surr += terms.surrogate;
        vf += (v - s.value_target).powi(2);
        kl += (terms.ratio - T::one()) - terms.log_ratio;
        clipped += usize::from((terms.ratio - T::one()).abs() > eps);

        // total = −mean(surrogate) + c1·mean((V − target)²) − c2·entropy
        let d_logp = -terms.d_surrogate / n;
        if d_logp != T::zero() {
            let (d_mean, d_ls) = gaussian_log_prob_grads(&mean, &log_std, &s.action);
            let d_mean: Vec<T> = d_mean.into_iter().map(|g| g * d_logp).collect();
            net.actor.backward(&mut net.params, &ac, &d_mean)?;
            for (acc, g) in d_log_std.iter_mut().zip(d_ls) {
                *acc += g * d_logp;
            }
        }
        let d_v = c1 * T::lit(2.0) * (v - s.value_target) / n;
        if d_v != T::zero() {
            net.critic.backward(&mut net.params, &cc, &[d_v])?;
        }
    }
    let entropy = gaussian_entropy(&log_std);
    let slice = net.log_std;
    for (g, d) in net.params.grad_mut(slice).iter_mut().zip(d_log_std) {
        *g += d - c2;
    }
    report(samples.len(), surr, vf, entropy, kl, clipped, c1, c2).map(|(_, r)| r)
}
