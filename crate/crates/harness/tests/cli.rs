use std::path::Path;
use std::process::{Command, Output};

use kanppo_harness::metrics::{read_metrics, write_metrics, MetricsRow, HEADER};
use kanppo_harness::Checkpoint;

fn kanppo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kanppo"))
        .args(args)
        .env("KANPPO_THREADS", "2")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn train(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "train",
        "--env",
        "point-reacher",
        "--arch",
        "kan-actor",
        "--total-steps",
        "2048",
        "--episodes",
        "3",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    kanppo(&args)
}

#[test]
fn count_params_table() {
    let o = kanppo(&["count-params"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("halfcheetah:17:6") && l.contains("kan-actor")).unwrap();
    assert!(row.split_whitespace().any(|w| w == "510"));
    let footer: Vec<&str> = text.lines().filter(|l| l.starts_with("mean (truncated)")).collect();
    assert_eq!(footer.len(), 4);
    assert!(footer.iter().any(|l| l.contains("full-kan") && l.trim_end().ends_with("415")));
}

#[test]
fn one_horizon_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = train(dir.path(), &["--seed", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = dir.path().join("point-reacher__kan-actor__seed0.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), HEADER);
    assert_eq!(text.lines().count(), 2);
    assert!(dir.path().join("point-reacher__kan-actor__seed0.ckpt.json").exists());
}

#[test]
fn seeds_get_their_own_files_and_reruns_match() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(train(a.path(), &["--seeds", "0..5"]).status.code(), Some(0));
    assert_eq!(train(b.path(), &["--seeds", "0,1,2,3,4"]).status.code(), Some(0));
    for seed in 0..5 {
        let name = format!("point-reacher__kan-actor__seed{seed}.csv");
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small run\nenv = pendulum-swingup\narch = full-kan\nhorizon = 128\nminibatch = 32\nepochs = 1\ntotal_steps = 256\nseeds = 4\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = kanppo(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--env",
        "cartpole-continuous",
        "--episodes",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_metrics(&out.join("cartpole-continuous__full-kan__seed4.csv")).unwrap();
    assert_eq!(rows.iter().map(|r| r.env_step).collect::<Vec<_>>(), vec![128, 256]);
    assert!(rows.iter().all(|r| r.wall_seconds == 0.0));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kanppo(&["train", "--arch", "transformer"]).status.code(), Some(2));
    assert_eq!(kanppo(&["train", "--env", "moon-lander"]).status.code(), Some(2));
    assert_eq!(kanppo(&["frobnicate"]).status.code(), Some(2));
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(kanppo(&["train", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(kanppo(&["eval", "/does/not/exist.ckpt.json"]).status.code(), Some(2));
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(kanppo(&["plot-data", empty.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn divergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = kanppo(&[
        "train",
        "--env",
        "point-reacher",
        "--arch",
        "mlp-a1c2",
        "--total-steps",
        "8192",
        "--seed",
        "0",
        "--set",
        "lr=1e300",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn eval_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    train(dir.path(), &["--seed", "1"]);
    let ckpt = dir.path().join("point-reacher__kan-actor__seed1.ckpt.json");
    let a = kanppo(&["eval", ckpt.to_str().unwrap(), "--episodes", "4"]);
    let b = kanppo(&["eval", ckpt.to_str().unwrap(), "--episodes", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("over 4 episodes"));
}

#[test]
fn prune_extremes() {
    let dir = tempfile::tempdir().unwrap();
    train(dir.path(), &["--seed", "2"]);
    let ckpt = dir.path().join("point-reacher__kan-actor__seed2.ckpt.json");
    let p = ckpt.to_str().unwrap();

    let o = kanppo(&["prune", p, "--threshold", "0", "--episodes", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("(0 pruned)"), "{text}");
    let eval_line = text.lines().find(|l| l.starts_with("eval return")).unwrap();
    let nums: Vec<&str> = eval_line.split_whitespace().collect();
    assert_eq!(nums[2], nums[4]);

    let o = kanppo(&["prune", p, "--threshold", "inf", "--episodes", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("edges 12 -> 0"));
    let pruned: kanppo::ActorCritic = Checkpoint::load(&dir.path().join("point-reacher__kan-actor__seed2.pruned.ckpt.json"))
        .unwrap()
        .network()
        .unwrap();
    assert_eq!(pruned.actor_mean(&[0.3, -0.2, 0.9, 0.0, 0.5, -1.0]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn prune_needs_kan_layers() {
    let dir = tempfile::tempdir().unwrap();
    let o = kanppo(&[
        "train",
        "--arch",
        "mlp-a2c2",
        "--total-steps",
        "2048",
        "--seed",
        "0",
        "--episodes",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let ckpt = dir.path().join("point-reacher__mlp-a2c2__seed0.ckpt.json");
    let o = kanppo(&["prune", ckpt.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nothing to prune"));
}

fn synthetic(seed: u64, returns: &[f64]) -> Vec<MetricsRow> {
    returns
        .iter()
        .enumerate()
        .map(|(i, &r)| MetricsRow {
            seed,
            env_step: 100 * (i + 1),
            mean_return: r,
            l_clip: 0.0,
            l_vf: 0.0,
            entropy: 0.0,
            approx_kl: 0.0,
            clip_fraction: 0.0,
            wall_seconds: 0.0,
        })
        .collect()
}

fn curve(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn plot_data_aggregates_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [[1.0, 2.0, 9.0], [3.0, 2.0, -1.0], [5.0, 2.0, 4.0]];
    for (seed, r) in runs.iter().enumerate() {
        write_metrics(&dir.path().join(format!("toy__kan-actor__seed{seed}.csv")), &synthetic(seed as u64, r)).unwrap();
    }
    write_metrics(&dir.path().join("toy__mlp-a2c2__seed0.csv"), &synthetic(0, &[7.0, 8.0, 9.0])).unwrap();
    write_metrics(&dir.path().join("toy__mlp-a1c2__seed0.csv"), &synthetic(0, &[1.0, 1.0, 1.0])).unwrap();
    write_metrics(&dir.path().join("toy__mlp-a1c2__seed1.csv"), &synthetic(1, &[1.0, 1.0, 1.0])).unwrap();
    let o = kanppo(&["plot-data", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let kan = curve(&dir.path().join("curve__toy__kan-actor.csv"));
    for (i, row) in kan.iter().enumerate() {
        let xs: Vec<f64> = runs.iter().map(|r| r[i]).collect();
        let mean = xs.iter().sum::<f64>() / 3.0;
        let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 3.0).sqrt();
        assert_eq!(row[0], 100.0 * (i + 1) as f64);
        assert!((row[1] - mean).abs() < 1e-12 && (row[2] - std).abs() < 1e-12);
        assert_eq!(row[3], 3.0);
    }
    let single = curve(&dir.path().join("curve__toy__mlp-a2c2.csv"));
    assert_eq!(single.iter().map(|r| (r[1], r[2])).collect::<Vec<_>>(), vec![(7.0, 0.0), (8.0, 0.0), (9.0, 0.0)]);
    let twin = curve(&dir.path().join("curve__toy__mlp-a1c2.csv"));
    assert!(twin.iter().all(|r| r[2] == 0.0 && r[3] == 2.0));
}

#[test]
fn bench_lines() {
    let o = kanppo(&["bench", "--total-steps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("actor params    510") && text.contains("actor params   5702"));

    let o = kanppo(&["bench", "--arch", "mlp-a1c2,mlp-a1c2", "--total-steps", "50", "--env", "hopper"]);
    let checksums: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.rsplit(' ').next().unwrap().to_owned())
        .collect();
    assert_eq!(checksums.len(), 2);
    assert_eq!(checksums[0], checksums[1]);
}
