use std::path::{Path, PathBuf};

use kanppo::envs::{make_env, Env, ObsNormalizer};
use kanppo::networks::{apply_prune_mask, compute_prune_mask, ParamCounts};
use kanppo::nn::Rng;
use kanppo::policy::{deterministic_action, ActionBounds};
use kanppo::ppo::{evaluate, EvalReport};
use kanppo::ActorCritic;

use crate::checkpoint::Checkpoint;
use crate::error::{HarnessError, Result};

const PROBE_STREAM: u64 = 5;

#[derive(Debug, Clone)]
pub struct PruneOptions {
    /// Fixed threshold; `None` sweeps candidate thresholds.
    pub threshold: Option<f64>,
    pub probe_episodes: usize,
    pub eval_episodes: usize,
    /// Largest relative eval-return loss the sweep accepts.
    pub max_degradation: f64,
    pub seed: u64,
    /// Output directory; defaults to the checkpoint's directory.
    pub out_dir: Option<PathBuf>,
}

impl Default for PruneOptions {
    fn default() -> Self {
        Self {
            threshold: None,
            probe_episodes: 10,
            eval_episodes: 100,
            max_degradation: 0.2,
            seed: 0,
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub threshold: f64,
    pub pruned_edges: usize,
    pub mean_return: f64,
    pub degradation: f64,
}

#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub threshold: f64,
    pub total_edges: usize,
    pub pruned_edges: usize,
    pub before: ParamCounts,
    pub after: ParamCounts,
    pub eval_before: EvalReport,
    pub eval_after: EvalReport,
    pub degradation: f64,
    pub sweep: Vec<SweepPoint>,
    pub output: PathBuf,
}

/// Network inputs visited by the deterministic policy over `episodes` episodes.
pub fn collect_probe_states(
    env: &mut dyn Env,
    net: &ActorCritic,
    normalizer: Option<&ObsNormalizer>,
    episodes: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let desc = env.descriptor().clone();
    let bounds = ActionBounds::new(desc.action_low, desc.action_high)?;
    let mut rng = Rng::with_stream(seed, PROBE_STREAM);
    let mut states = Vec::new();
    for _ in 0..episodes {
        let mut raw = env.reset(rng.next_u64());
        loop {
            let obs = normalizer.map_or_else(|| raw.clone(), |n| n.network_input(&raw));
            let action = deterministic_action(net, &obs, &bounds)?;
            states.push(obs);
            let step = env.step(&action)?;
            if step.terminated || step.truncated {
                break;
            }
            raw = step.obs;
        }
    }
    Ok(states)
}

/// Relative loss of eval return; negative when pruning helps.
fn degradation(before: f64, after: f64) -> f64 {
    (before - after) / before.abs().max(1e-12)
}

fn output_path(input: &Path, out_dir: Option<&Path>) -> PathBuf {
    let name = input.file_name().and_then(|n| n.to_str()).unwrap_or("checkpoint.ckpt.json");
    let stem = name.strip_suffix(".ckpt.json").or_else(|| name.strip_suffix(".json")).unwrap_or(name);
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
    dir.join(format!("{stem}.pruned.ckpt.json"))
}

/// Midpoints between consecutive distinct importances, plus one above the
/// largest: each candidate removes one more group of edges.
fn candidate_thresholds(importances: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = importances.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut out: Vec<f64> = v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    if let Some(&last) = v.last() {
        out.push(last * 2.0 + f64::MIN_POSITIVE);
    }
    out
}

/// Prunes low-importance KAN edges of a checkpoint and writes the masked copy.
pub fn cmd_prune(path: &Path, opts: &PruneOptions) -> Result<PruneOutcome> {
    if opts.probe_episodes == 0 || opts.eval_episodes == 0 {
        return Err(HarnessError::Usage("probe and eval episodes must be at least 1".into()));
    }
    let ckpt = Checkpoint::load(path)?;
    let net: ActorCritic = ckpt.network()?;
    if !net.has_kan() {
        return Err(HarnessError::Usage(format!("{}: nothing to prune (no KAN layers)", path.display())));
    }
    let mut env = make_env(&ckpt.env)?;
    let norm = ckpt.normalizer.as_ref();
    let probes = collect_probe_states(env.as_mut(), &net, norm, opts.probe_episodes, opts.seed)?;
    let eval_before = evaluate(env.as_mut(), &net, norm, opts.eval_episodes, opts.seed)?;

    let pruned_net = |threshold: f64| -> Result<(ActorCritic, usize, usize)> {
        let mask = compute_prune_mask(&net, &probes, threshold)?;
        let mut pruned = net.clone();
        apply_prune_mask(&mut pruned, &mask)?;
        Ok((pruned, mask.pruned_edges(), mask.total_edges()))
    };

    let mut sweep = Vec::new();
    let threshold = match opts.threshold {
        Some(t) => t,
        None => {
            let importances: Vec<f64> = compute_prune_mask(&net, &probes, 0.0)?.importances().collect();
            let mut best = 0.0;
            let mut best_pruned = 0;
            for t in candidate_thresholds(&importances) {
                let (candidate, pruned_edges, _) = pruned_net(t)?;
                let report = evaluate(env.as_mut(), &candidate, norm, opts.eval_episodes, opts.seed)?;
                let d = degradation(eval_before.mean_return, report.mean_return);
                log::info!("threshold {t:.6}: {pruned_edges} edges pruned, return {:.3}", report.mean_return);
                sweep.push(SweepPoint {
                    threshold: t,
                    pruned_edges,
                    mean_return: report.mean_return,
                    degradation: d,
                });
                if d <= opts.max_degradation && pruned_edges > best_pruned {
                    best = t;
                    best_pruned = pruned_edges;
                }
            }
            best
        }
    };

    let (pruned, pruned_edges, total_edges) = pruned_net(threshold)?;
    let eval_after = evaluate(env.as_mut(), &pruned, norm, opts.eval_episodes, opts.seed)?;
    let output = output_path(path, opts.out_dir.as_deref());
    Checkpoint {
        network: pruned.snapshot(),
        ..ckpt
    }
    .save(&output)?;
    Ok(PruneOutcome {
        threshold,
        total_edges,
        pruned_edges,
        before: net.counted_params(),
        after: pruned.counted_params(),
        degradation: degradation(eval_before.mean_return, eval_after.mean_return),
        eval_before,
        eval_after,
        sweep,
        output,
    })
}
