use std::fmt;

use kanppo::envs::MUJOCO_DIMS;
use kanppo::networks::{count_params, Arch, NetworkSpec, ParamCounts};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CountRow {
    /// `name:obs:act`
    pub env: String,
    pub arch: Arch,
    pub counts: ParamCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
    /// Per-architecture means over the environments, truncated toward zero.
    pub means: Vec<(Arch, ParamCounts)>,
}

impl CountTable {
    pub fn get(&self, env: &str, arch: Arch) -> Option<ParamCounts> {
        self.rows
            .iter()
            .find(|r| r.arch == arch && (r.env == env || r.env.split(':').next() == Some(env)))
            .map(|r| r.counts)
    }

    /// Truncated mean of actor + critic, computed on the summed totals.
    pub fn mean_total(&self, arch: Arch) -> Option<usize> {
        let rows: Vec<_> = self.rows.iter().filter(|r| r.arch == arch).collect();
        (!rows.is_empty()).then(|| rows.iter().map(|r| r.counts.total()).sum::<usize>() / rows.len())
    }

    pub fn mean(&self, arch: Arch) -> Option<ParamCounts> {
        self.means.iter().find(|(a, _)| *a == arch).map(|(_, c)| *c)
    }
}

/// Actor / critic parameter counts for every MuJoCo dimension pair and
/// architecture at grid `(k, g)`.
pub fn cmd_count_params(k: usize, g: usize) -> Result<CountTable> {
    let mut rows = Vec::new();
    for dims in MUJOCO_DIMS {
        for arch in Arch::ALL {
            let spec = NetworkSpec::new(arch).with_grid(k, g);
            spec.validate()?;
            rows.push(CountRow {
                env: dims.key(),
                arch,
                counts: count_params(&spec, dims.obs_dim, dims.act_dim),
            });
        }
    }
    let n = MUJOCO_DIMS.len();
    let means = Arch::ALL
        .iter()
        .map(|&arch| {
            let (a, c) = rows
                .iter()
                .filter(|r| r.arch == arch)
                .fold((0, 0), |(a, c), r| (a + r.counts.actor, c + r.counts.critic));
            (arch, ParamCounts { actor: a / n, critic: c / n })
        })
        .collect();
    Ok(CountTable { rows, means })
}

impl fmt::Display for CountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {:<10} {:>8} {:>8} {:>13}", "env", "arch", "actor", "critic", "actor+critic")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<22} {:<10} {:>8} {:>8} {:>13}",
                r.env,
                r.arch.name(),
                r.counts.actor,
                r.counts.critic,
                r.counts.total()
            )?;
        }
        for (arch, m) in &self.means {
            let total = self.mean_total(*arch).unwrap_or(0);
            writeln!(
                f,
                "{:<22} {:<10} {:>8} {:>8} {:>13}",
                "mean (truncated)",
                arch.name(),
                m.actor,
                m.critic,
                total
            )?;
        }
        Ok(())
    }
}
