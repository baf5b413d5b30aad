mod bench;
mod count;
mod eval;
mod plot;
mod prune;
mod train;

pub use bench::{cmd_bench, BenchLine};
pub use count::{cmd_count_params, CountRow, CountTable};
pub use eval::cmd_eval;
pub use plot::{aggregate, cmd_plot_data, parse_run_name, CurvePoint};
pub use prune::{cmd_prune, collect_probe_states, PruneOptions, PruneOutcome, SweepPoint};
pub use train::{cmd_train, run_name, train_seed, worker_threads, SeedResult};
