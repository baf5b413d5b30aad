//! PPO objective terms, minibatch updates and the collect/update loop.

mod config;
mod loss;
mod train;
mod update;

pub use config::PpoConfig;
pub use loss::{clip_objective, combined_loss, combined_loss_value, l_pg, l_pg_grad, ratio, LossProbe, LossReport, Sample};
pub use train::{evaluate, train, EvalReport, IterationReport, TrainOutcome, Trainer};
pub use update::{build_samples, ppo_update};
