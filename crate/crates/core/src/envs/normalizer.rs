use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result};

/// Running (Welford) observation standardiser with clipping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObsNormalizer {
    pub mean: Vec<f64>,
    /// Sum of squared deviations.
    pub m2: Vec<f64>,
    pub count: u64,
    pub clip: f64,
    /// Divisor applied after clipping to form network inputs.
    #[serde(default = "unit_scale")]
    pub input_scale: f64,
    pub frozen: bool,
}

fn unit_scale() -> f64 {
    1.0
}

impl ObsNormalizer {
    pub fn new(dim: usize) -> Self {
        Self::with_clip(dim, 5.0)
    }

    pub fn with_clip(dim: usize, clip: f64) -> Self {
        Self {
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
            count: 0,
            clip,
            input_scale: 1.0,
            frozen: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Population variance; 1 before any observation.
    pub fn variance(&self) -> Vec<f64> {
        if self.count == 0 {
            return vec![1.0; self.dim()];
        }
        self.m2.iter().map(|m| m / self.count as f64).collect()
    }

    /// Folds `x` into the statistics unless frozen.
    pub fn update(&mut self, x: &[f64]) -> Result<()> {
        check_len("observation", self.dim(), x.len())?;
        if self.frozen {
            return Ok(());
        }
        self.count += 1;
        let n = self.count as f64;
        for ((m, m2), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *m2 += delta * (v - *m);
        }
        Ok(())
    }

    /// clip((x − mean) / √(var + 1e-8), ±clip)
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        let var = self.variance();
        x.iter()
            .zip(&self.mean)
            .zip(var)
            .map(|((&v, &m), s2)| ((v - m) / (s2 + 1e-8).sqrt()).clamp(-self.clip, self.clip))
            .collect()
    }

    /// Network input: `normalize(x) / input_scale`.
    pub fn network_input(&self, x: &[f64]) -> Vec<f64> {
        self.normalize(x).into_iter().map(|v| v / self.input_scale).collect()
    }
}
