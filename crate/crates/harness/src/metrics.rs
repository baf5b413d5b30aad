use std::path::Path;

use kanppo::ppo::IterationReport;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::io::write_atomic;

pub const HEADER: &str = "seed,env_step,mean_return,l_clip,l_vf,entropy,approx_kl,clip_fraction,wall_seconds";

/// One line of a metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub seed: u64,
    pub env_step: usize,
    /// Mean of the last 10 finished episodes; NaN before any finishes.
    pub mean_return: f64,
    pub l_clip: f64,
    pub l_vf: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub wall_seconds: f64,
}

impl MetricsRow {
    pub fn from_report(seed: u64, report: &IterationReport, record_wall_time: bool) -> Self {
        Self {
            seed,
            env_step: report.env_step,
            mean_return: report.mean_return,
            l_clip: report.loss.l_clip,
            l_vf: report.loss.l_vf,
            entropy: report.loss.entropy,
            approx_kl: report.loss.approx_kl,
            clip_fraction: report.loss.clip_fraction,
            wall_seconds: if record_wall_time { report.wall_seconds } else { 0.0 },
        }
    }
}

pub fn to_csv(rows: &[MetricsRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::Usage(e.to_string()))?;
    }
    if rows.is_empty() {
        return Ok(format!("{HEADER}\n").into_bytes());
    }
    w.into_inner().map_err(|e| HarnessError::Usage(e.to_string()))
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    write_atomic(path, &to_csv(rows)?)
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::format(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| HarnessError::format(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.join(",") != HEADER {
        return Err(HarnessError::format(path, "unexpected metrics header"));
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<MetricsRow>, _>>()
        .map_err(|e| HarnessError::format(path, e))?;
    Ok(rows)
}
