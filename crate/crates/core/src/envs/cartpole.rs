use crate::envs::{check_action, Env, EnvDescriptor, EpisodeClock, StepResult, DT};
use crate::error::Result;
use crate::nn::Rng;

const GRAVITY: f64 = 9.8;
const MASS_CART: f64 = 1.0;
const MASS_POLE: f64 = 0.1;
const HALF_LENGTH: f64 = 0.5;
const FORCE_LIMIT: f64 = 10.0;
const THETA_LIMIT: f64 = 12.0 * std::f64::consts::PI / 180.0;
const X_LIMIT: f64 = 2.4;

/// Classic cart-pole with a continuous force in [−10, 10].
/// obs = [x, ẋ, θ, θ̇]; +1 per step until the pole falls or the cart leaves
/// the track.
#[derive(Debug, Clone)]
pub struct CartPoleContinuous {
    desc: EnvDescriptor,
    pub state: [f64; 4],
    clock: EpisodeClock,
}

impl Default for CartPoleContinuous {
    fn default() -> Self {
        Self::new()
    }
}

impl CartPoleContinuous {
    pub fn new() -> Self {
        Self {
            desc: EnvDescriptor {
                name: "cartpole-continuous".into(),
                obs_dim: 4,
                act_dim: 1,
                action_low: vec![-FORCE_LIMIT],
                action_high: vec![FORCE_LIMIT],
                max_episode_steps: 500,
            },
            state: [0.0; 4],
            clock: EpisodeClock::default(),
        }
    }

    pub fn integrate(state: [f64; 4], force: f64) -> [f64; 4] {
        let [x, x_dot, theta, theta_dot] = state;
        let total_mass = MASS_CART + MASS_POLE;
        let pole_moment = MASS_POLE * HALF_LENGTH;
        let (sin, cos) = theta.sin_cos();
        let temp = (force + pole_moment * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc =
            (GRAVITY * sin - cos * temp) / (HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos * cos / total_mass));
        let x_acc = temp - pole_moment * theta_acc * cos / total_mass;
        let x_dot = x_dot + DT * x_acc;
        let theta_dot = theta_dot + DT * theta_acc;
        [x + DT * x_dot, x_dot, theta + DT * theta_dot, theta_dot]
    }

    pub fn failed(state: &[f64; 4]) -> bool {
        state[0].abs() > X_LIMIT || state[2].abs() > THETA_LIMIT
    }
}

impl Env for CartPoleContinuous {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed);
        for v in &mut self.state {
            *v = rng.uniform(-0.05, 0.05);
        }
        self.clock.reset();
        self.state.to_vec()
    }

    fn step(&mut self, action: &[f64]) -> Result<StepResult> {
        check_action(&self.desc, action)?;
        self.clock.begin_step()?;
        self.state = Self::integrate(self.state, action[0]);
        let terminated = Self::failed(&self.state);
        let truncated = self.clock.finish_step(terminated, self.desc.max_episode_steps);
        Ok(StepResult {
            obs: self.state.to_vec(),
            reward: 1.0,
            terminated,
            truncated,
        })
    }
}
