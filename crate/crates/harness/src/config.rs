//! Run configuration and its flat `key = value` file format.
//!
//! ```text
//! # comment
//! env = point-reacher
//! arch = kan-actor
//! seeds = 0, 1, 2
//! total_steps = 100000
//! max_grad_norm = none
//! ```
//!
//! Keys: `env`, `arch`, `k`, `g`, `seeds`, `out_dir`, `record_wall_time` and
//! every [`PpoConfig`] field (`epsilon`, `c1`, `c2`, `lr`, `epochs`,
//! `minibatch`, `horizon`, `gamma`, `lambda`, `total_steps`, `eval_episodes`,
//! `normalize_advantages`, `normalize_obs`, `obs_input_scale`,
//! `max_grad_norm`, `log_std_min`, `log_std_max`).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kanppo::networks::{Arch, NetworkSpec};
use kanppo::ppo::PpoConfig;

use crate::error::{HarnessError, Result};

pub const KEYS: [&str; 24] = [
    "env",
    "arch",
    "k",
    "g",
    "seeds",
    "out_dir",
    "record_wall_time",
    "epsilon",
    "c1",
    "c2",
    "lr",
    "epochs",
    "minibatch",
    "horizon",
    "gamma",
    "lambda",
    "total_steps",
    "eval_episodes",
    "normalize_advantages",
    "normalize_obs",
    "obs_input_scale",
    "max_grad_norm",
    "log_std_min",
    "log_std_max",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub env: String,
    pub arch: Arch,
    pub k: usize,
    pub g: usize,
    pub ppo: PpoConfig,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// When false the `wall_seconds` column is written as 0 so reruns
    /// produce identical files.
    pub record_wall_time: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            env: "point-reacher".into(),
            arch: Arch::KanActor,
            k: 2,
            g: 3,
            ppo: PpoConfig::default(),
            seeds: vec![0, 1, 2, 3, 4],
            out_dir: PathBuf::from("runs"),
            record_wall_time: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| HarnessError::Usage(format!("invalid value for {key}: {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(HarnessError::Usage(format!("invalid value for {key}: {value:?}"))),
    }
}

/// Parses `0,1,2`, `0 1 2` or a range `0..5`.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = value.split_once("..") {
        let (a, b): (u64, u64) = (parse("seeds", a.trim())?, parse("seeds", b.trim())?);
        return Ok((a..b).collect());
    }
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse("seeds", s))
        .collect()
}

impl RunConfig {
    pub fn network_spec(&self) -> NetworkSpec {
        NetworkSpec::new(self.arch).with_grid(self.k, self.g)
    }

    /// Assigns one key. Unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let p = &mut self.ppo;
        match key {
            "env" => self.env = value.to_owned(),
            "arch" => self.arch = value.parse().map_err(|e: kanppo::Error| HarnessError::Usage(e.to_string()))?,
            "k" => self.k = parse(key, value)?,
            "g" => self.g = parse(key, value)?,
            "seeds" | "seed" => self.seeds = parse_seeds(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "record_wall_time" => self.record_wall_time = parse_bool(key, value)?,
            "epsilon" => p.epsilon = parse(key, value)?,
            "c1" => p.c1 = parse(key, value)?,
            "c2" => p.c2 = parse(key, value)?,
            "lr" => p.lr = parse(key, value)?,
            "epochs" => p.epochs = parse(key, value)?,
            "minibatch" => p.minibatch = parse(key, value)?,
            "horizon" => p.horizon = parse(key, value)?,
            "gamma" => p.gamma = parse(key, value)?,
            "lambda" => p.lambda = parse(key, value)?,
            "total_steps" => p.total_steps = parse(key, value)?,
            "eval_episodes" => p.eval_episodes = parse(key, value)?,
            "normalize_advantages" => p.normalize_advantages = parse_bool(key, value)?,
            "normalize_obs" => p.normalize_obs = parse_bool(key, value)?,
            "obs_input_scale" => p.obs_input_scale = parse(key, value)?,
            "max_grad_norm" => {
                p.max_grad_norm = match value.to_ascii_lowercase().as_str() {
                    "none" | "off" | "" => None,
                    _ => Some(parse(key, value)?),
                }
            }
            "log_std_min" => p.log_std_min = parse(key, value)?,
            "log_std_max" => p.log_std_max = parse(key, value)?,
            _ => return Err(HarnessError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::ConfigSyntax {
                line: i + 1,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            self.set(key.trim(), value).map_err(|e| HarnessError::ConfigSyntax {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    /// Renders the configuration in the file format; `apply_text` reads it back.
    pub fn to_text(&self) -> String {
        let p = &self.ppo;
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let grad = p.max_grad_norm.map_or("none".to_owned(), |m| m.to_string());
        let values: [String; 24] = [
            self.env.clone(),
            self.arch.name().to_owned(),
            self.k.to_string(),
            self.g.to_string(),
            seeds.join(", "),
            self.out_dir.display().to_string(),
            self.record_wall_time.to_string(),
            p.epsilon.to_string(),
            p.c1.to_string(),
            p.c2.to_string(),
            p.lr.to_string(),
            p.epochs.to_string(),
            p.minibatch.to_string(),
            p.horizon.to_string(),
            p.gamma.to_string(),
            p.lambda.to_string(),
            p.total_steps.to_string(),
            p.eval_episodes.to_string(),
            p.normalize_advantages.to_string(),
            p.normalize_obs.to_string(),
            p.obs_input_scale.to_string(),
            grad,
            p.log_std_min.to_string(),
            p.log_std_max.to_string(),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(HarnessError::Usage(m));
        if self.seeds.is_empty() {
            return usage("seeds must not be empty".into());
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return usage("seeds must be distinct".into());
        }
        if self.env.contains("__") || self.env.contains('/') {
            return usage(format!("invalid env name {:?}", self.env));
        }
        kanppo::envs::make_env(&self.env)?;
        self.network_spec().validate()?;
        self.ppo.validate()?;
        Ok(())
    }
}
