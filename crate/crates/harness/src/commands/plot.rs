use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::io::write_atomic;
use crate::metrics::{read_metrics, MetricsRow};

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub env_step: usize,
    pub mean_return: f64,
    /// Population std across seeds.
    pub std_return: f64,
    pub seeds: usize,
}

/// Splits `{env}__{arch}__seed{N}.csv` into its parts.
pub fn parse_run_name(file_name: &str) -> Option<(String, String, u64)> {
    let stem = file_name.strip_suffix(".csv")?;
    let mut parts = stem.split("__");
    let (env, arch, seed) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || env.is_empty() || arch.is_empty() {
        return None;
    }
    let seed = seed.strip_prefix("seed")?.parse().ok()?;
    Some((env.to_owned(), arch.to_owned(), seed))
}

/// Cross-seed mean and std of `mean_return` at every logged step. Seeds
/// without a finite value at a step are left out of that step.
pub fn aggregate(runs: &[Vec<MetricsRow>]) -> Vec<CurvePoint> {
    let mut by_step: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for run in runs {
        for row in run {
            let entry = by_step.entry(row.env_step).or_default();
            if row.mean_return.is_finite() {
                entry.push(row.mean_return);
            }
        }
    }
    by_step
        .into_iter()
        .map(|(env_step, xs)| {
            let n = xs.len() as f64;
            let (mean, std) = if xs.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                let mean = xs.iter().sum::<f64>() / n;
                (mean, (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt())
            };
            CurvePoint {
                env_step,
                mean_return: mean,
                std_return: std,
                seeds: xs.len(),
            }
        })
        .collect()
}

fn curve_csv(points: &[CurvePoint]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| HarnessError::Usage(e.to_string());
    w.write_record(["env_step", "mean_return", "std_return", "seeds"]).map_err(err)?;
    for p in points {
        w.write_record([
            p.env_step.to_string(),
            p.mean_return.to_string(),
            p.std_return.to_string(),
            p.seeds.to_string(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| HarnessError::Usage(e.to_string()))
}

/// Writes `curve__{env}__{arch}.csv` for every (env, arch) group of metrics
/// files in `dir`. Returns the written paths.
pub fn cmd_plot_data(dir: &Path, out_dir: Option<&Path>) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut groups: BTreeMap<(String, String), Vec<(u64, PathBuf)>> = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| HarnessError::io(dir, e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some((env, arch, seed)) = parse_run_name(name) {
            groups.entry((env, arch)).or_default().push((seed, path));
        }
    }
    if groups.is_empty() {
        return Err(HarnessError::Usage(format!("no metrics CSV files in {}", dir.display())));
    }
    let out_dir = out_dir.unwrap_or(dir);
    let mut written = Vec::new();
    for ((env, arch), mut files) in groups {
        files.sort();
        let runs = files.iter().map(|(_, p)| read_metrics(p)).collect::<Result<Vec<_>>>()?;
        let path = out_dir.join(format!("curve__{env}__{arch}.csv"));
        write_atomic(&path, &curve_csv(&aggregate(&runs))?)?;
        written.push(path);
    }
    Ok(written)
}
