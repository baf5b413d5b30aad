use crate::envs::{check_action, Env, EnvDescriptor, EpisodeClock, StepResult, DT};
use crate::error::Result;
use crate::nn::Rng;

const FRICTION: f64 = 0.95;
const CONTROL_COST: f64 = 0.01;
const GOAL_RADIUS: f64 = 0.05;
const GOAL_BONUS: f64 = 10.0;

/// 2-D point mass pushed towards a goal.
///
/// obs = [pos, vel, goal − pos]; episodes start at rest at the origin with a goal uniform in [−1, 1]².
#[derive(Debug, Clone)]
pub struct PointReacher {
    desc: EnvDescriptor,
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    pub goal: [f64; 2],
    clock: EpisodeClock,
}

impl Default for PointReacher {
    fn default() -> Self {
        Self::new()
    }
}

impl PointReacher {
    pub fn new() -> Self {
        Self {
            desc: EnvDescriptor {
                name: "point-reacher".into(),
                obs_dim: 6,
                act_dim: 2,
                action_low: vec![-1.0; 2],
                action_high: vec![1.0; 2],
                max_episode_steps: 200,
            },
            pos: [0.0; 2],
            vel: [0.0; 2],
            goal: [0.0; 2],
            clock: EpisodeClock::default(),
        }
    }

    pub fn distance(&self) -> f64 {
        (self.pos[0] - self.goal[0]).hypot(self.pos[1] - self.goal[1])
    }

    /// −‖pos − goal‖ − 0.01‖a‖², without the goal bonus.
    pub fn shaped_reward(pos: [f64; 2], goal: [f64; 2], action: &[f64]) -> f64 {
        let dist = (pos[0] - goal[0]).hypot(pos[1] - goal[1]);
        -dist - CONTROL_COST * action.iter().map(|a| a * a).sum::<f64>()
    }

    pub fn observation(&self) -> Vec<f64> {
        vec![
            self.pos[0],
            self.pos[1],
            self.vel[0],
            self.vel[1],
            self.goal[0] - self.pos[0],
            self.goal[1] - self.pos[1],
        ]
    }
}

impl Env for PointReacher {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed);
        self.pos = [0.0, 0.0];
        self.goal = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
        self.vel = [0.0; 2];
        self.clock.reset();
        self.observation()
    }

    #[allow(clippy::needless_range_loop)]
    fn step(&mut self, action: &[f64]) -> Result<StepResult> {
        check_action(&self.desc, action)?;
        self.clock.begin_step()?;
        for d in 0..2 {
            self.vel[d] = (self.vel[d] + action[d] * DT) * FRICTION;
            self.pos[d] += self.vel[d] * DT;
        }
        let mut reward = Self::shaped_reward(self.pos, self.goal, action);
        let terminated = self.distance() < GOAL_RADIUS;
        if terminated {
            reward += GOAL_BONUS;
        }
        let truncated = self.clock.finish_step(terminated, self.desc.max_episode_steps);
        Ok(StepResult {
            obs: self.observation(),
            reward,
            terminated,
            truncated,
        })
    }
}
