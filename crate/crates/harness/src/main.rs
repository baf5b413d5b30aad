use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kanppo::networks::Arch;
use kanppo_harness::commands::{
    cmd_bench, cmd_count_params, cmd_eval, cmd_plot_data, cmd_prune, cmd_train, PruneOptions,
};
use kanppo_harness::{HarnessError, Result, RunConfig};

#[derive(Parser)]
#[command(name = "kanppo", version, about = "PPO with KAN and MLP policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one run per seed; writes metrics CSVs and checkpoints.
    Train(TrainArgs),
    /// Evaluate a checkpoint without exploration noise.
    Eval {
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print actor/critic parameter counts for the MuJoCo dimension pairs.
    CountParams {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        g: usize,
    },
    /// Time actor forward passes for two or more architectures.
    Bench {
        /// Comma-separated architecture list.
        #[arg(long, default_value = "kan-actor,mlp-a2c2")]
        arch: String,
        /// Environment name, `name:obs:act` or `obs:act`.
        #[arg(long, default_value = "halfcheetah:17:6")]
        env: String,
        /// Number of forward passes per architecture.
        #[arg(long = "total-steps", default_value_t = 1000)]
        total_steps: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        g: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mask low-importance KAN edges of a checkpoint.
    Prune {
        checkpoint: PathBuf,
        /// Fixed importance threshold; omitted means sweep.
        #[arg(long)]
        threshold: Option<f64>,
        /// Evaluation episodes before and after pruning.
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long = "probe-episodes", default_value_t = 10)]
        probe_episodes: usize,
        #[arg(long = "max-degradation", default_value_t = 0.2)]
        max_degradation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate metrics CSVs into per-(env, arch) curve files.
    PlotData {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    arch: Option<String>,
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// e.g. `0,1,2` or `0..5`
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long = "total-steps")]
    total_steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    g: Option<usize>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl TrainArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| match value {
            Some(v) => config.set(key, &v),
            None => Ok(()),
        };
        set("env", self.env.clone())?;
        set("arch", self.arch.clone())?;
        set("seeds", self.seed.map(|s| s.to_string()).or(self.seeds.clone()))?;
        set("total_steps", self.total_steps.map(|v| v.to_string()))?;
        set("eval_episodes", self.episodes.map(|v| v.to_string()))?;
        set("k", self.k.map(|v| v.to_string()))?;
        set("g", self.g.map(|v| v.to_string()))?;
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| HarnessError::Usage(format!("expected KEY=VALUE, got {kv:?}")))?;
            config.set(k.trim(), v)?;
        }
        if let Some(out) = &self.out {
            config.out_dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn parse_archs(list: &str) -> Result<Vec<Arch>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|e: kanppo::Error| HarnessError::Usage(e.to_string())))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => {
            let config = args.resolve()?;
            for r in cmd_train(&config)? {
                println!(
                    "seed {}: eval {:.3} ± {:.3} over {} episodes -> {}",
                    r.seed,
                    r.eval.mean_return,
                    r.eval.std_return,
                    r.eval.episodes,
                    r.metrics_path.display()
                );
            }
        }
        Command::Eval { checkpoint, episodes, seed } => {
            let report = cmd_eval(&checkpoint, episodes, seed)?;
            println!(
                "mean return {:.3} ± {:.3} over {} episodes (deterministic)",
                report.mean_return, report.std_return, report.episodes
            );
        }
        Command::CountParams { k, g } => print!("{}", cmd_count_params(k, g)?),
        Command::Bench { arch, env, total_steps, k, g, seed } => {
            let archs = parse_archs(&arch)?;
            for line in cmd_bench(&archs, &env, total_steps, k, g, seed)? {
                println!(
                    "{:<10} actor params {:>6}  total params {:>6}  {} steps {:.6} s  {:.3} us/step  checksum {:.12e}",
                    line.arch.name(),
                    line.params.actor,
                    line.params.total(),
                    line.steps,
                    line.total_seconds,
                    line.per_step_seconds * 1e6,
                    line.checksum
                );
            }
        }
        Command::Prune { checkpoint, threshold, episodes, probe_episodes, max_degradation, seed, out } => {
            let opts = PruneOptions {
                threshold,
                probe_episodes,
                eval_episodes: episodes,
                max_degradation,
                seed,
                out_dir: out,
            };
            let r = cmd_prune(&checkpoint, &opts)?;
            for p in &r.sweep {
                println!(
                    "candidate threshold {:.6e}: {} edges pruned, return {:.3}, degradation {:.1}%",
                    p.threshold,
                    p.pruned_edges,
                    p.mean_return,
                    p.degradation * 100.0
                );
            }
            println!("threshold {:.6e}", r.threshold);
            println!("edges {} -> {} ({} pruned)", r.total_edges, r.total_edges - r.pruned_edges, r.pruned_edges);
            println!("params {} -> {}", r.before.total(), r.after.total());
            println!(
                "eval return {:.3} -> {:.3} (degradation {:.1}%)",
                r.eval_before.mean_return,
                r.eval_after.mean_return,
                r.degradation * 100.0
            );
            println!("wrote {}", r.output.display());
        }
        Command::PlotData { dir, out } => {
            for path in cmd_plot_data(&dir, out.as_deref())? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
