use crate::error::Result;
use crate::nn::ParamStore;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 3e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam with bias-corrected moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    m: Vec<T>,
    v: Vec<T>,
    t: u64,
}

impl<T: Scalar> Adam<T> {
    pub fn new(n_params: usize, config: AdamConfig) -> Self {
        assert!(config.lr > 0.0, "learning rate must be positive");
        Self {
            lr: T::lit(config.lr),
            beta1: T::lit(config.beta1),
            beta2: T::lit(config.beta2),
            eps: T::lit(config.eps),
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Applies one update from the gradients currently stored in `params`.
    /// Gradients are left untouched; the caller zeroes them.
    pub fn step(&mut self, params: &mut ParamStore<T>) -> Result<()> {
        crate::error::check_len("adam state", self.m.len(), params.len())?;
        params.check_finite_grads()?;
        self.t += 1;
        let one = T::one();
        let t = i32::try_from(self.t).unwrap_or(i32::MAX);
        let bc1 = one - self.beta1.powi(t);
        let bc2 = one - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let grads = params.grads().to_vec();
        for (((w, &g), m), v) in params
            .values_mut()
            .iter_mut()
            .zip(&grads)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = b1 * *m + (one - b1) * g;
            *v = b2 * *v + (one - b2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *w -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(value: f64, grad: f64) -> ParamStore<f64> {
        let mut store = ParamStore::new();
        let s = store.alloc("w", 1);
        store.get_mut(s)[0] = value;
        store.grad_mut(s)[0] = grad;
        store
    }

    #[test]
    fn zero_gradient_leaves_value() {
        let mut store = single(0.7, 0.0);
        let mut adam = Adam::new(1, AdamConfig::default());
        for _ in 0..50 {
            adam.step(&mut store).unwrap();
        }
        assert_eq!(store.values()[0], 0.7);
        assert_eq!(adam.steps(), 50);
    }

    #[test]
    fn first_step_closed_form() {
        let mut store = single(1.0, 1.0);
        let mut adam = Adam::new(
            1,
            AdamConfig {
                lr: 1e-3,
                ..Default::default()
            },
        );
        adam.step(&mut store).unwrap();
        let expected = 1.0 - 1e-3 * (1.0 / (1.0 + 1e-8));
        assert!((store.values()[0] - expected).abs() < 1e-15);
        assert!((store.values()[0] - 0.999).abs() < 1e-6);
        assert_eq!(store.grads()[0], 1.0, "grads are left for the caller");
    }

    #[test]
    fn symmetric_params_stay_equal() {
        let mut store = ParamStore::<f64>::new();
        let s = store.alloc("w", 2);
        store.get_mut(s).copy_from_slice(&[0.3, 0.3]);
        store.grad_mut(s).copy_from_slice(&[-0.2, -0.2]);
        let mut adam = Adam::new(2, AdamConfig::default());
        adam.step(&mut store).unwrap();
        assert_eq!(store.values()[0], store.values()[1]);
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut store = single(1.0, f64::INFINITY);
        let mut adam = Adam::new(1, AdamConfig::default());
        let err = adam.step(&mut store).unwrap_err();
        assert!(err.to_string().contains("`w`"));
        assert_eq!(adam.steps(), 0);
    }
}
