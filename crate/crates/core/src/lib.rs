//! Kolmogorov-Arnold network (KAN) policies trained with proximal policy
//! optimization (PPO).
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the 64-bit precision used for training and gradient
//! checking.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod envs;
pub mod error;
pub mod networks;
pub mod nn;
pub mod policy;
pub mod ppo;
pub mod rl;
pub mod scalar;
pub mod spline;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type KnotGrid = spline::KnotGrid<f64>;
pub type ParamStore = nn::ParamStore<f64>;
pub type Adam = nn::Adam<f64>;
pub type KanLayer = networks::KanLayer<f64>;
pub type ActorCritic = networks::ActorCritic<f64>;
pub type PruneMask = networks::PruneMask<f64>;
pub type RolloutBuffer = rl::RolloutBuffer<f64>;
pub type AdvantageBatch = rl::AdvantageBatch<f64>;
pub type Trainer = ppo::Trainer<f64>;

pub type KnotGrid32 = spline::KnotGrid<f32>;
pub type ActorCritic32 = networks::ActorCritic<f32>;
