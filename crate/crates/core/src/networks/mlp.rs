use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::nn::{ParamSlice, ParamStore};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    fn apply<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::Tanh => {
                let e = (-(z.abs() + z.abs())).exp();
                let t = (T::one() - e) / (T::one() + e);
                if z < T::zero() {
                    -t
                } else {
                    t
                }
            }
            Activation::Relu => z.max(T::zero()),
            Activation::Identity => z,
        }
    }

    /// Derivative given pre-activation `z` and output `y`.
    #[inline]
    fn derivative<T: Scalar>(self, z: T, y: T) -> T {
        match self {
            Activation::Tanh => T::one() - y * y,
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Identity => T::one(),
        }
    }
}

/// Dense layer `y = act(W x + b)` with `W` stored `[n_out][n_in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpLayer {
    pub n_in: usize,
    pub n_out: usize,
    pub activation: Activation,
    pub weights: ParamSlice,
    pub biases: ParamSlice,
}

#[derive(Debug, Clone, Default)]
pub struct MlpCache<T> {
    x: Vec<T>,
    z: Vec<T>,
    y: Vec<T>,
}

impl MlpLayer {
    pub fn new<T: Scalar>(
        params: &mut ParamStore<T>,
        name: &str,
        n_in: usize,
        n_out: usize,
        activation: Activation,
    ) -> Self {
        let weights = params.alloc(format!("{name}.weight"), n_in * n_out);
        let biases = params.alloc(format!("{name}.bias"), n_out);
        Self {
            n_in,
            n_out,
            activation,
            weights,
            biases,
        }
    }

    pub fn param_count(&self) -> usize {
        self.n_in * self.n_out + self.n_out
    }

    pub fn forward<T: Scalar>(&self, params: &ParamStore<T>, x: &[T], cache: &mut MlpCache<T>) -> Result<Vec<T>> {
        check_len("mlp layer input", self.n_in, x.len())?;
        let w = params.get(self.weights);
        let b = params.get(self.biases);
        cache.x.clear();
        cache.x.extend_from_slice(x);
        cache.z.resize(self.n_out, T::zero());
        cache.y.resize(self.n_out, T::zero());
        for (((row, &bj), z), y) in w.chunks_exact(self.n_in).zip(b).zip(&mut cache.z).zip(&mut cache.y) {
            *z = dot(row, x) + bj;
            *y = self.activation.apply(*z);
        }
        Ok(cache.y.clone())
    }

    pub fn backward<T: Scalar>(&self, params: &mut ParamStore<T>, cache: &MlpCache<T>, dy: &[T]) -> Result<Vec<T>> {
        if cache.x.len() != self.n_in || cache.z.len() != self.n_out {
            return Err(Error::StaleCache("mlp layer"));
        }
        check_len("mlp layer upstream gradient", self.n_out, dy.len())?;
        let dz: Vec<T> = (0..self.n_out)
            .map(|j| dy[j] * self.activation.derivative(cache.z[j], cache.y[j]))
            .collect();
        let mut dx = vec![T::zero(); self.n_in];
        {
            let (w, gw) = params.split(self.weights);
            for (j, &d) in dz.iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                let row = &w[j * self.n_in..(j + 1) * self.n_in];
                let grow = &mut gw[j * self.n_in..(j + 1) * self.n_in];
                for i in 0..self.n_in {
                    grow[i] += d * cache.x[i];
                    dx[i] += d * row[i];
                }
            }
        }
        for (gb, &d) in params.grad_mut(self.biases).iter_mut().zip(&dz) {
            *gb += d;
        }
        Ok(dx)
    }
}
