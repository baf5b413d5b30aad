use std::time::Instant;

use kanppo::envs::lookup_dims;
use kanppo::networks::{Arch, NetworkSpec, ParamCounts, Role, StackCache};
use kanppo::nn::Rng;
use kanppo::ActorCritic;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchLine {
    pub arch: Arch,
    pub params: ParamCounts,
    pub steps: usize,
    pub total_seconds: f64,
    pub per_step_seconds: f64,
    /// Sum of every actor output; equal across runs of the same network.
    pub checksum: f64,
}

/// Times `steps` actor forward passes per architecture on the current
/// thread. All architectures see the same observation stream.
pub fn cmd_bench(archs: &[Arch], env: &str, steps: usize, k: usize, g: usize, seed: u64) -> Result<Vec<BenchLine>> {
    if steps == 0 {
        return Err(HarnessError::Usage("bench needs at least one step".into()));
    }
    let (obs_dim, act_dim) = lookup_dims(env)?;
    let mut rng = Rng::with_stream(seed, 9);
    let stream: Vec<Vec<f64>> = (0..steps)
        .map(|_| (0..obs_dim).map(|_| rng.normal().clamp(-1.0, 1.0)).collect())
        .collect();
    let mut lines = Vec::with_capacity(archs.len());
    for &arch in archs {
        let spec = NetworkSpec::new(arch).with_grid(k, g);
        let net: ActorCritic = ActorCritic::build(spec, obs_dim, act_dim, &mut Rng::new(seed))?;
        let stack = net.stack(Role::Actor);
        let mut cache = StackCache::default();
        let mut checksum = 0.0;
        let start = Instant::now();
        for obs in &stream {
            let out = stack.forward(&net.params, obs, &mut cache)?;
            checksum += out.iter().sum::<f64>();
        }
        let total_seconds = start.elapsed().as_secs_f64();
        lines.push(BenchLine {
            arch,
            params: net.counted_params(),
            steps,
            total_seconds,
            per_step_seconds: total_seconds / steps as f64,
            checksum,
        });
    }
    Ok(lines)
}
