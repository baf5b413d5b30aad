//! Magnitude pruning of KAN edges.
//!
//! An edge's importance is the mean absolute spline output over a batch of
//! probe states. Edges below the threshold are masked: they contribute
//! nothing to the forward pass and receive no gradient.

use crate::error::{Error, Result};
use crate::networks::actor_critic::{ActorCritic, MaskEntry, Role};
use crate::networks::spec::ParamCounts;
use crate::networks::stack::StackCache;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerPrune<T> {
    pub role: Role,
    pub layer: usize,
    pub n_in: usize,
    pub n_out: usize,
    /// `[n_out][n_in]`
    pub keep: Vec<bool>,
    /// `[n_out][n_in]`
    pub importance: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneMask<T> {
    pub threshold: T,
    pub layers: Vec<LayerPrune<T>>,
}

impl<T: Scalar> PruneMask<T> {
    pub fn total_edges(&self) -> usize {
        self.layers.iter().map(|l| l.keep.len()).sum()
    }

    pub fn kept_edges(&self) -> usize {
        self.layers.iter().map(|l| l.keep.iter().filter(|&&k| k).count()).sum()
    }

    pub fn pruned_edges(&self) -> usize {
        self.total_edges() - self.kept_edges()
    }

    /// Every importance value across layers.
    pub fn importances(&self) -> impl Iterator<Item = T> + '_ {
        self.layers.iter().flat_map(|l| l.importance.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneReport<T> {
    pub mask: PruneMask<T>,
    pub before: ParamCounts,
    pub after: ParamCounts,
}

/// Scores every KAN edge on `probe_states` and marks those whose importance
/// is below `threshold`. Edges already masked stay masked.
pub fn compute_prune_mask<T: Scalar>(
    net: &ActorCritic<T>,
    probe_states: &[Vec<T>],
    threshold: T,
) -> Result<PruneMask<T>> {
    if probe_states.is_empty() {
        return Err(Error::Empty("probe batch"));
    }
    if threshold.is_nan() || threshold < T::zero() {
        return Err(Error::InvalidConfig("prune threshold must be non-negative".into()));
    }
    if !net.has_kan() {
        return Err(Error::InvalidConfig("network has no KAN layers; nothing to prune".into()));
    }
    let mut layers = Vec::new();
    let scale = T::one() / T::lit(probe_states.len() as f64);
    for role in [Role::Actor, Role::Critic] {
        let stack = net.stack(role);
        let kan: Vec<_> = stack.kan_layers().collect();
        if kan.is_empty() {
            continue;
        }
        let mut sums: Vec<Vec<T>> = kan.iter().map(|(_, l)| vec![T::zero(); l.n_in * l.n_out]).collect();
        let mut cache = StackCache::default();
        for obs in probe_states {
            stack.forward(&net.params, obs, &mut cache)?;
            for ((index, layer), sum) in kan.iter().zip(sums.iter_mut()) {
                let c = cache.kan(*index).ok_or(Error::StaleCache("prune probe"))?;
                for j in 0..layer.n_out {
                    for i in 0..layer.n_in {
                        sum[j * layer.n_in + i] += layer.cached_edge_value(&net.params, c, j, i).abs();
                    }
                }
            }
        }
        for ((index, layer), sum) in kan.iter().zip(sums) {
            let importance: Vec<T> = sum.into_iter().map(|s| s * scale).collect();
            let keep = (0..layer.n_out * layer.n_in)
                .map(|e| layer.is_kept(e / layer.n_in, e % layer.n_in) && !(importance[e] < threshold))
                .collect();
            layers.push(LayerPrune {
                role,
                layer: *index,
                n_in: layer.n_in,
                n_out: layer.n_out,
                keep,
                importance,
            });
        }
    }
    Ok(PruneMask { threshold, layers })
}

pub fn apply_prune_mask<T: Scalar>(net: &mut ActorCritic<T>, mask: &PruneMask<T>) -> Result<()> {
    for l in &mask.layers {
        net.set_mask(&MaskEntry {
            role: l.role,
            layer: l.layer,
            keep: l.keep.clone(),
        })?;
    }
    Ok(())
}

/// Computes and applies a prune mask, reporting parameter counts before and after.
pub fn prune<T: Scalar>(net: &mut ActorCritic<T>, probe_states: &[Vec<T>], threshold: T) -> Result<PruneReport<T>> {
    let before = net.counted_params();
    let mask = compute_prune_mask(net, probe_states, threshold)?;
    apply_prune_mask(net, &mask)?;
    Ok(PruneReport {
        mask,
        before,
        after: net.counted_params(),
    })
}
