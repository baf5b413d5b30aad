use std::f64::consts::PI;

use crate::envs::{check_action, Env, EnvDescriptor, EpisodeClock, StepResult, DT};
use crate::error::Result;
use crate::nn::Rng;

pub const GRAVITY: f64 = 10.0;
pub const MASS: f64 = 1.0;
pub const LENGTH: f64 = 1.0;
pub const MAX_SPEED: f64 = 8.0;
pub const MAX_TORQUE: f64 = 2.0;

/// θ = 0 is upright.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumState {
    pub theta: f64,
    pub theta_dot: f64,
}

impl PendulumState {
    /// Kinetic plus potential energy of the uniform rod about its pivot.
    pub fn energy(&self) -> f64 {
        let inertia = MASS * LENGTH * LENGTH / 3.0;
        0.5 * inertia * self.theta_dot.powi(2) + MASS * GRAVITY * 0.5 * LENGTH * self.theta.cos()
    }
}

/// Angle wrapped into [−π, π).
pub fn wrap_angle(theta: f64) -> f64 {
    (theta + PI).rem_euclid(2.0 * PI) - PI
}

/// Torque-limited pendulum that must be swung up and balanced.
#[derive(Debug, Clone)]
pub struct PendulumSwingup {
    desc: EnvDescriptor,
    pub state: PendulumState,
    clock: EpisodeClock,
}

impl Default for PendulumSwingup {
    fn default() -> Self {
        Self::new()
    }
}

impl PendulumSwingup {
    pub fn new() -> Self {
        Self {
            desc: EnvDescriptor {
                name: "pendulum-swingup".into(),
                obs_dim: 3,
                act_dim: 1,
                action_low: vec![-MAX_TORQUE],
                action_high: vec![MAX_TORQUE],
                max_episode_steps: 200,
            },
            state: PendulumState {
                theta: PI,
                theta_dot: 0.0,
            },
            clock: EpisodeClock::default(),
        }
    }

    /// Semi-implicit Euler: velocity first (then clipped to ±8), then angle.
    pub fn integrate(state: PendulumState, torque: f64) -> PendulumState {
        let accel = 3.0 * GRAVITY / (2.0 * LENGTH) * state.theta.sin() + 3.0 * torque / (MASS * LENGTH * LENGTH);
        let theta_dot = (state.theta_dot + accel * DT).clamp(-MAX_SPEED, MAX_SPEED);
        PendulumState {
            theta: state.theta + theta_dot * DT,
            theta_dot,
        }
    }

    /// −(wrap(θ)² + 0.1·θ̇² + 0.001·a²), evaluated on the pre-step state.
    pub fn reward(state: PendulumState, torque: f64) -> f64 {
        -(wrap_angle(state.theta).powi(2) + 0.1 * state.theta_dot.powi(2) + 0.001 * torque * torque)
    }

    pub fn observe(state: PendulumState) -> Vec<f64> {
        vec![state.theta.cos(), state.theta.sin(), state.theta_dot / MAX_SPEED]
    }
}

impl Env for PendulumSwingup {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed);
        self.state = PendulumState {
            theta: rng.uniform(-PI, PI),
            theta_dot: rng.uniform(-1.0, 1.0),
        };
        self.clock.reset();
        Self::observe(self.state)
    }

    fn step(&mut self, action: &[f64]) -> Result<StepResult> {
        check_action(&self.desc, action)?;
        self.clock.begin_step()?;
        let reward = Self::reward(self.state, action[0]);
        self.state = Self::integrate(self.state, action[0]);
        let truncated = self.clock.finish_step(false, self.desc.max_episode_steps);
        Ok(StepResult {
            obs: Self::observe(self.state),
            reward,
            terminated: false,
            truncated,
        })
    }
}
