use std::path::PathBuf;

use kanppo::envs::make_env;
use kanppo::networks::Arch;
use kanppo::nn::Rng;
use kanppo::ppo::{evaluate, EvalReport, Trainer};
use kanppo::ActorCritic;
use rayon::prelude::*;

use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::metrics::{write_metrics, MetricsRow};

/// `{env}__{arch}__seed{seed}`, the stem shared by a run's CSV and checkpoint.
pub fn run_name(env: &str, arch: Arch, seed: u64) -> String {
    format!("{env}__{}__seed{seed}", arch.name())
}

/// Worker count: `KANPPO_THREADS` if set, otherwise the available cores.
pub fn worker_threads() -> usize {
    std::env::var("KANPPO_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone)]
pub struct SeedResult {
    pub seed: u64,
    pub metrics_path: PathBuf,
    pub checkpoint_path: PathBuf,
    pub rows: Vec<MetricsRow>,
    pub eval: EvalReport,
}

/// Trains, evaluates and saves one seed.
pub fn train_seed(config: &RunConfig, seed: u64) -> Result<SeedResult> {
    let env = make_env(&config.env)?;
    let desc = env.descriptor().clone();
    let net: ActorCritic = ActorCritic::build(config.network_spec(), desc.obs_dim, desc.act_dim, &mut Rng::new(seed))?;
    let mut trainer = Trainer::new(env, net, config.ppo.clone(), seed)?;
    let mut rows = Vec::new();
    let history = trainer.run(|report| {
        log::info!(
            "{} seed {seed}: step {} return {:.2}",
            config.env,
            report.env_step,
            report.mean_return
        );
        rows.push(MetricsRow::from_report(seed, report, config.record_wall_time));
        Ok(())
    })?;
    let outcome = trainer.into_outcome(history);
    let normalizer = config.ppo.normalize_obs.then_some(outcome.normalizer);

    let mut eval_env = make_env(&config.env)?;
    let eval = evaluate(eval_env.as_mut(), &outcome.net, normalizer.as_ref(), config.ppo.eval_episodes, seed)?;

    let stem = run_name(&config.env, config.arch, seed);
    let metrics_path = config.out_dir.join(format!("{stem}.csv"));
    let checkpoint_path = config.out_dir.join(format!("{stem}.ckpt.json"));
    write_metrics(&metrics_path, &rows)?;
    let env_step = rows.last().map_or(0, |r| r.env_step);
    Checkpoint::new(&config.env, seed, env_step, &outcome.net, normalizer).save(&checkpoint_path)?;
    Ok(SeedResult {
        seed,
        metrics_path,
        checkpoint_path,
        rows,
        eval,
    })
}

/// Trains every configured seed, in parallel up to [`worker_threads`].
/// Results come back in seed order.
pub fn cmd_train(config: &RunConfig) -> Result<Vec<SeedResult>> {
    config.validate()?;
    let threads = worker_threads().min(config.seeds.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| config.seeds.par_iter().map(|&seed| train_seed(config, seed)).collect())
}
