//! KAN and MLP layers, the actor-critic architectures, parameter counting
//! and KAN edge pruning.

mod actor_critic;
mod kan;
mod mlp;
mod prune;
mod spec;
mod stack;

pub use actor_critic::{ActorCritic, MaskEntry, NetworkSnapshot, Role};
pub use kan::{KanCache, KanLayer};
pub use mlp::{Activation, MlpCache, MlpLayer};
pub use prune::{apply_prune_mask, compute_prune_mask, prune, LayerPrune, PruneMask, PruneReport};
pub use spec::{count_params, Arch, NetworkSpec, ParamCounts};
pub use stack::{Layer, LayerCache, Stack, StackCache};
