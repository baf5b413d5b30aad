use crate::error::Result;
use crate::networks::ActorCritic;
use crate::nn::{Adam, Rng};
use crate::ppo::loss::{combined_loss, LossReport, Sample};
use crate::ppo::PpoConfig;
use crate::rl::{minibatch_iter, normalize_advantages, AdvantageBatch, RolloutBuffer};
use crate::scalar::Scalar;

/// Pairs every stored transition with its advantage and value target,
/// normalising advantages first when configured.
pub fn build_samples<T: Scalar>(
    buffer: &RolloutBuffer<T>,
    advantages: &AdvantageBatch<T>,
    normalize: bool,
) -> Vec<Sample<T>> {
    let mut adv = advantages.clone();
    if normalize && adv.advantages.len() >= 2 {
        normalize_advantages(&mut adv);
    }
    buffer
        .transitions()
        .iter()
        .zip(adv.advantages.iter().zip(&adv.returns))
        .map(|(t, (&a, &ret))| Sample {
            obs: t.obs.clone(),
            action: t.action.clone(),
            log_prob_old: t.log_prob,
            advantage: a,
            value_target: ret,
        })
        .collect()
}

/// K epochs of shuffled minibatch Adam steps on the combined objective.
/// Returns one report per minibatch.
pub fn ppo_update<T: Scalar>(
    net: &mut ActorCritic<T>,
    buffer: &RolloutBuffer<T>,
    advantages: &AdvantageBatch<T>,
    config: &PpoConfig,
    optimizer: &mut Adam<T>,
    rng: &mut Rng,
) -> Result<Vec<LossReport>> {
    let samples = build_samples(buffer, advantages, config.normalize_advantages);
    let batch_size = config.minibatch.min(samples.len());
    let mut reports = Vec::new();
    let mut minibatch = Vec::with_capacity(batch_size);
    for _ in 0..config.epochs {
        for indices in minibatch_iter(samples.len(), batch_size, rng)? {
            minibatch.clear();
            minibatch.extend(indices.iter().map(|&i| samples[i].clone()));
            net.params.zero_grads();
            reports.push(combined_loss(net, &minibatch, config)?);
            if let Some(max) = config.max_grad_norm {
                net.params.clip_grad_norm(T::lit(max));
            }
            optimizer.step(&mut net.params)?;
            net.clamp_log_std(T::lit(config.log_std_min), T::lit(config.log_std_max));
        }
    }
    net.params.zero_grads();
    Ok(reports)
}
