use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networks::mlp::Activation;

/// The four actor-critic configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arch {
    /// MLP actor and critic, two hidden layers each.
    #[serde(rename = "mlp-a2c2")]
    MlpA2C2,
    /// MLP actor with one hidden layer, MLP critic with two.
    #[serde(rename = "mlp-a1c2")]
    MlpA1C2,
    /// Hidden-layer-free KAN actor, two-hidden-layer MLP critic.
    #[serde(rename = "kan-actor")]
    KanActor,
    /// Hidden-layer-free KAN actor and critic.
    #[serde(rename = "full-kan")]
    FullKan,
}

impl Arch {
    pub const ALL: [Arch; 4] = [Arch::FullKan, Arch::KanActor, Arch::MlpA2C2, Arch::MlpA1C2];

    pub fn name(self) -> &'static str {
        match self {
            Arch::MlpA2C2 => "mlp-a2c2",
            Arch::MlpA1C2 => "mlp-a1c2",
            Arch::KanActor => "kan-actor",
            Arch::FullKan => "full-kan",
        }
    }

    pub fn kan_actor(self) -> bool {
        matches!(self, Arch::KanActor | Arch::FullKan)
    }

    pub fn kan_critic(self) -> bool {
        matches!(self, Arch::FullKan)
    }

    pub fn actor_hidden_layers(self) -> usize {
        match self {
            Arch::MlpA2C2 => 2,
            Arch::MlpA1C2 => 1,
            Arch::KanActor | Arch::FullKan => 0,
        }
    }

    pub fn critic_hidden_layers(self) -> usize {
        if self.kan_critic() {
            0
        } else {
            2
        }
    }
}

impl fmt::Display for Arch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Arch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mlp-a2c2" | "mlp_a2c2" | "mlp" => Ok(Arch::MlpA2C2),
            "mlp-a1c2" | "mlp_a1c2" => Ok(Arch::MlpA1C2),
            "kan-actor" | "kan_actor" | "kan" => Ok(Arch::KanActor),
            "full-kan" | "full_kan" => Ok(Arch::FullKan),
            other => Err(Error::UnknownArch(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub arch: Arch,
    /// spline degree
    pub k: usize,
    /// spline grid intervals
    pub g: usize,
    pub hidden_width: usize,
    pub activation: Activation,
}

impl NetworkSpec {
    pub fn new(arch: Arch) -> Self {
        Self {
            arch,
            k: 2,
            g: 3,
            hidden_width: 64,
            activation: Activation::Tanh,
        }
    }

    pub fn with_grid(mut self, k: usize, g: usize) -> Self {
        self.k = k;
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0 {
            return Err(Error::InvalidConfig("g must be at least 1".into()));
        }
        if self.hidden_width == 0 {
            return Err(Error::InvalidConfig("hidden width must be at least 1".into()));
        }
        Ok(())
    }
}

/// Learnable parameters of each network; the policy's log-std vector is
/// not part of either.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamCounts {
    pub actor: usize,
    pub critic: usize,
}

impl ParamCounts {
    pub fn total(&self) -> usize {
        self.actor + self.critic
    }
}

fn mlp_count(n_in: usize, hidden: usize, layers: usize, n_out: usize) -> usize {
    let mut count = 0;
    let mut width = n_in;
    for _ in 0..layers {
        count += width * hidden + hidden;
        width = hidden;
    }
    count + width * n_out + n_out
}

/// Closed-form parameter counts for `spec` on an environment with the given
/// observation and action sizes.
pub fn count_params(spec: &NetworkSpec, obs_dim: usize, act_dim: usize) -> ParamCounts {
    let per_edge = spec.g + spec.k;
    let h = spec.hidden_width;
    let actor = if spec.arch.kan_actor() {
        obs_dim * act_dim * per_edge
    } else {
        mlp_count(obs_dim, h, spec.arch.actor_hidden_layers(), act_dim)
    };
    let critic = if spec.arch.kan_critic() {
        obs_dim * per_edge
    } else {
        mlp_count(obs_dim, h, spec.arch.critic_hidden_layers(), 1)
    };
    ParamCounts { actor, critic }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn actor(arch: Arch, obs: usize, act: usize) -> usize {
        count_params(&NetworkSpec::new(arch), obs, act).actor
    }

    #[test]
    fn reference_counts() {
        assert_eq!(actor(Arch::KanActor, 17, 6), 510);
        assert_eq!(actor(Arch::MlpA2C2, 23, 7), 6151);
        assert_eq!(actor(Arch::MlpA1C2, 11, 3), 963);
        assert_eq!(actor(Arch::FullKan, 4, 1), 20);
    }

    #[test]
    fn critic_counts() {
        let c = count_params(&NetworkSpec::new(Arch::FullKan), 17, 6);
        assert_eq!(c.critic, 85);
        let c = count_params(&NetworkSpec::new(Arch::KanActor), 17, 6);
        assert_eq!(c.critic, 17 * 64 + 64 + 64 * 64 + 64 + 65);
    }

    #[test]
    fn arch_names_round_trip() {
        for a in Arch::ALL {
            assert_eq!(a.name().parse::<Arch>().unwrap(), a);
        }
        assert_eq!("tkan".parse::<Arch>(), Err(Error::UnknownArch("tkan".into())));
    }
}
