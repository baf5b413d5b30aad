use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networks::kan::KanLayer;
use crate::networks::mlp::{Activation, MlpLayer};
use crate::networks::spec::{NetworkSpec, ParamCounts};
use crate::networks::stack::{Layer, Stack, StackCache};
use crate::nn::{ParamSlice, ParamStore, Rng};
use crate::scalar::Scalar;
use crate::spline::KnotGrid;

const HIDDEN_GAIN: f64 = std::f64::consts::SQRT_2;
const OUTPUT_GAIN: f64 = 0.01;
const KAN_INIT_SCALE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Actor,
    Critic,
}

/// Policy network, value network and the state-independent log standard
/// deviation of the Gaussian policy, all backed by one parameter store.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorCritic<T> {
    pub spec: NetworkSpec,
    pub obs_dim: usize,
    pub act_dim: usize,
    pub params: ParamStore<T>,
    pub actor: Stack<T>,
    pub critic: Stack<T>,
    pub log_std: ParamSlice,
}

/// Serializable image of an [`ActorCritic`]: structure, flat parameters and
/// pruning masks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSnapshot {
    pub spec: NetworkSpec,
    pub obs_dim: usize,
    pub act_dim: usize,
    pub params: Vec<f64>,
    pub masks: Vec<MaskEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskEntry {
    pub role: Role,
    pub layer: usize,
    pub keep: Vec<bool>,
}

fn build_stack<T: Scalar>(
    params: &mut ParamStore<T>,
    name: &str,
    spec: &NetworkSpec,
    kan: bool,
    hidden_layers: usize,
    n_in: usize,
    n_out: usize,
) -> Result<Stack<T>> {
    let mut layers = Vec::new();
    if kan {
        let grid = KnotGrid::on_unit_interval(spec.k, spec.g)?;
        layers.push(Layer::Kan(KanLayer::new(params, &format!("{name}.0.kan"), n_in, n_out, grid)));
    } else {
        let mut width = n_in;
        for i in 0..hidden_layers {
            let l = MlpLayer::new(params, &format!("{name}.{i}.mlp"), width, spec.hidden_width, spec.activation);
            layers.push(Layer::Mlp(l));
            width = spec.hidden_width;
        }
        let l = MlpLayer::new(
            params,
            &format!("{name}.{hidden_layers}.mlp"),
            width,
            n_out,
            Activation::Identity,
        );
        layers.push(Layer::Mlp(l));
    }
    Ok(Stack { layers })
}

/// Gaussian matrix with orthonormal rows (or columns, if taller than wide),
/// scaled by `gain`.
fn orthogonal(rows: usize, cols: usize, gain: f64, rng: &mut Rng) -> Vec<f64> {
    let (n_vec, dim) = if rows <= cols { (rows, cols) } else { (cols, rows) };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n_vec);
    while basis.len() < n_vec {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    let mut w = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            w[r * cols + c] = gain * if rows <= cols { basis[r][c] } else { basis[c][r] };
        }
    }
    w
}

fn init_stack<T: Scalar>(stack: &Stack<T>, params: &mut ParamStore<T>, rng: &mut Rng) {
    let last = stack.layers.len() - 1;
    for (idx, layer) in stack.layers.iter().enumerate() {
        match layer {
            Layer::Kan(l) => {
                let std = KAN_INIT_SCALE / (l.grid.n_basis() as f64).sqrt();
                for c in params.get_mut(l.coeffs) {
                    *c = T::lit(std * rng.normal());
                }
            }
            Layer::Mlp(l) => {
                let gain = if idx == last { OUTPUT_GAIN } else { HIDDEN_GAIN };
                let w = orthogonal(l.n_out, l.n_in, gain, rng);
                for (p, v) in params.get_mut(l.weights).iter_mut().zip(w) {
                    *p = T::lit(v);
                }
            }
        }
    }
}

impl<T: Scalar> ActorCritic<T> {
    /// Builds and initialises the networks described by `spec`.
    pub fn build(spec: NetworkSpec, obs_dim: usize, act_dim: usize, rng: &mut Rng) -> Result<Self> {
        let mut net = Self::uninitialized(spec, obs_dim, act_dim)?;
        init_stack(&net.actor, &mut net.params, rng);
        init_stack(&net.critic, &mut net.params, rng);
        Ok(net)
    }

    /// Same structure as [`ActorCritic::build`] with every parameter zero.
    pub fn uninitialized(spec: NetworkSpec, obs_dim: usize, act_dim: usize) -> Result<Self> {
        spec.validate()?;
        if obs_dim == 0 || act_dim == 0 {
            return Err(Error::InvalidConfig(format!(
                "observation and action sizes must be positive (got {obs_dim}, {act_dim})"
            )));
        }
        let mut params = ParamStore::new();
        let actor = build_stack(
            &mut params,
            "actor",
            &spec,
            spec.arch.kan_actor(),
            spec.arch.actor_hidden_layers(),
            obs_dim,
            act_dim,
        )?;
        let critic = build_stack(
            &mut params,
            "critic",
            &spec,
            spec.arch.kan_critic(),
            spec.arch.critic_hidden_layers(),
            obs_dim,
            1,
        )?;
        let log_std = params.alloc("log_std", act_dim);
        Ok(Self {
            spec,
            obs_dim,
            act_dim,
            params,
            actor,
            critic,
            log_std,
        })
    }

    pub fn stack(&self, role: Role) -> &Stack<T> {
        match role {
            Role::Actor => &self.actor,
            Role::Critic => &self.critic,
        }
    }

    pub(crate) fn stack_mut(&mut self, role: Role) -> &mut Stack<T> {
        match role {
            Role::Actor => &mut self.actor,
            Role::Critic => &mut self.critic,
        }
    }

    pub fn log_std(&self) -> &[T] {
        self.params.get(self.log_std)
    }

    /// Action mean under `params` (which may be a perturbed copy).
    pub fn actor_mean_with(&self, params: &ParamStore<T>, obs: &[T], cache: &mut StackCache<T>) -> Result<Vec<T>> {
        self.actor.forward(params, obs, cache)
    }

    pub fn value_with(&self, params: &ParamStore<T>, obs: &[T], cache: &mut StackCache<T>) -> Result<T> {
        Ok(self.critic.forward(params, obs, cache)?[0])
    }

    pub fn actor_mean(&self, obs: &[T]) -> Result<Vec<T>> {
        self.actor_mean_with(&self.params, obs, &mut StackCache::default())
    }

    pub fn value(&self, obs: &[T]) -> Result<T> {
        self.value_with(&self.params, obs, &mut StackCache::default())
    }

    /// Parameter counts of the instantiated networks, excluding masked edges.
    pub fn counted_params(&self) -> ParamCounts {
        ParamCounts {
            actor: self.actor.param_count(),
            critic: self.critic.param_count(),
        }
    }

    pub fn has_kan(&self) -> bool {
        self.actor.kan_layers().next().is_some() || self.critic.kan_layers().next().is_some()
    }

    /// Clamps every log standard deviation into `[lo, hi]`.
    pub fn clamp_log_std(&mut self, lo: T, hi: T) {
        let slice = self.log_std;
        for v in self.params.get_mut(slice) {
            *v = v.max(lo).min(hi);
        }
    }

    pub fn masks(&self) -> Vec<MaskEntry> {
        let mut out = Vec::new();
        for role in [Role::Actor, Role::Critic] {
            for (layer, kan) in self.stack(role).kan_layers() {
                if let Some(keep) = kan.keep_mask() {
                    out.push(MaskEntry {
                        role,
                        layer,
                        keep: keep.to_vec(),
                    });
                }
            }
        }
        out
    }

    pub fn set_mask(&mut self, entry: &MaskEntry) -> Result<()> {
        let layer = self
            .stack_mut(entry.role)
            .kan_layer_mut(entry.layer)
            .ok_or_else(|| Error::InvalidConfig(format!("layer {} is not a KAN layer", entry.layer)))?;
        layer.set_keep_mask(Some(entry.keep.clone()))
    }

    pub fn snapshot(&self) -> NetworkSnapshot {
        NetworkSnapshot {
            spec: self.spec,
            obs_dim: self.obs_dim,
            act_dim: self.act_dim,
            params: self.params.values().iter().map(|v| v.as_f64()).collect(),
            masks: self.masks(),
        }
    }

    pub fn from_snapshot(snapshot: &NetworkSnapshot) -> Result<Self> {
        let mut net = Self::uninitialized(snapshot.spec, snapshot.obs_dim, snapshot.act_dim)?;
        let values: Vec<T> = snapshot.params.iter().map(|&v| T::lit(v)).collect();
        net.params.set_values(&values)?;
        for m in &snapshot.masks {
            net.set_mask(m)?;
        }
        Ok(net)
    }
}
