//! Kolmogorov-Arnold layer: one learnable spline per (output, input) edge,
//! summed at each output node.

use crate::error::{check_len, Error, Result};
use crate::nn::{ParamSlice, ParamStore};
use crate::scalar::Scalar;
use crate::spline::KnotGrid;

/// Coefficients are stored `[n_out][n_in][g + k]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KanLayer<T> {
    pub n_in: usize,
    pub n_out: usize,
    pub grid: KnotGrid<T>,
    pub coeffs: ParamSlice,
    /// `keep[j * n_in + i]`; `None` means every edge is active.
    keep: Option<Vec<bool>>,
}

#[derive(Debug, Clone, Default)]
pub struct KanCache<T> {
    pub(crate) x: Vec<T>,
    /// basis values, `[n_in][g + k]`
    pub(crate) basis: Vec<T>,
    pub(crate) first: Vec<usize>,
    filled: bool,
}

impl<T: Scalar> KanLayer<T> {
    pub fn new(params: &mut ParamStore<T>, name: &str, n_in: usize, n_out: usize, grid: KnotGrid<T>) -> Self {
        let coeffs = params.alloc(format!("{name}.coeffs"), n_in * n_out * grid.n_basis());
        Self {
            n_in,
            n_out,
            grid,
            coeffs,
            keep: None,
        }
    }

    #[inline]
    fn edge_offset(&self, j: usize, i: usize) -> usize {
        (j * self.n_in + i) * self.grid.n_basis()
    }

    #[inline]
    pub fn is_kept(&self, j: usize, i: usize) -> bool {
        self.keep.as_ref().is_none_or(|k| k[j * self.n_in + i])
    }

    pub fn keep_mask(&self) -> Option<&[bool]> {
        self.keep.as_deref()
    }

    /// Installs an edge mask (`[n_out][n_in]`); `None` restores every edge.
    pub fn set_keep_mask(&mut self, keep: Option<Vec<bool>>) -> Result<()> {
        if let Some(k) = &keep {
            check_len("kan edge mask", self.n_in * self.n_out, k.len())?;
        }
        self.keep = keep;
        Ok(())
    }

    pub fn active_edges(&self) -> usize {
        self.keep
            .as_ref()
            .map_or(self.n_in * self.n_out, |k| k.iter().filter(|&&b| b).count())
    }

    /// Learnable coefficients on active edges.
    pub fn param_count(&self) -> usize {
        self.active_edges() * self.grid.n_basis()
    }

    /// φ_{j,i}(x) for a single edge, ignoring the mask.
    pub fn edge_value(&self, params: &ParamStore<T>, j: usize, i: usize, x: T) -> T {
        let nb = self.grid.n_basis();
        let off = self.edge_offset(j, i);
        let c = &params.get(self.coeffs)[off..off + nb];
        self.grid.eval_spline(c, x).expect("edge coefficient length matches grid")
    }

    /// Contribution of edge (j, i) given cached basis values.
    pub(crate) fn cached_edge_value(&self, params: &ParamStore<T>, cache: &KanCache<T>, j: usize, i: usize) -> T {
        let nb = self.grid.n_basis();
        let c = &params.get(self.coeffs)[self.edge_offset(j, i)..][..nb];
        let b = &cache.basis[i * nb..(i + 1) * nb];
        let first = cache.first[i];
        let last = (first + self.grid.degree()).min(nb - 1);
        (first..=last).map(|m| c[m] * b[m]).sum()
    }

    pub fn forward(&self, params: &ParamStore<T>, x: &[T], cache: &mut KanCache<T>) -> Result<Vec<T>> {
        check_len("kan layer input", self.n_in, x.len())?;
        let nb = self.grid.n_basis();
        cache.x.clear();
        cache.x.extend_from_slice(x);
        cache.basis.resize(self.n_in * nb, T::zero());
        cache.first.resize(self.n_in, 0);
        for (i, &xi) in x.iter().enumerate() {
            if !xi.is_finite() {
                return Err(Error::NonFinite(format!("kan layer input {i}")));
            }
            cache.first[i] = self.grid.basis_into(xi, &mut cache.basis[i * nb..(i + 1) * nb]);
        }
        cache.filled = true;
        let y = (0..self.n_out)
            .map(|j| {
                (0..self.n_in)
                    .filter(|&i| self.is_kept(j, i))
                    .map(|i| self.cached_edge_value(params, cache, j, i))
                    .sum()
            })
            .collect();
        Ok(y)
    }

    /// Accumulates dL/dc into `params` and returns dL/dx.
    #[allow(clippy::needless_range_loop)]
    pub fn backward(&self, params: &mut ParamStore<T>, cache: &KanCache<T>, dy: &[T]) -> Result<Vec<T>> {
        if !cache.filled || cache.x.len() != self.n_in {
            return Err(Error::StaleCache("kan layer"));
        }
        check_len("kan layer upstream gradient", self.n_out, dy.len())?;
        let nb = self.grid.n_basis();
        let k = self.grid.degree();
        let mut dx = vec![T::zero(); self.n_in];
        let mut dbasis = vec![T::zero(); nb];
        let (coeffs, grads) = params.split(self.coeffs);
        for i in 0..self.n_in {
            let b = &cache.basis[i * nb..(i + 1) * nb];
            let first = cache.first[i];
            let last = (first + k).min(nb - 1);
            let has_slope = k > 0 && self.grid.contains(cache.x[i]);
            if has_slope {
                self.grid.basis_derivatives_into(cache.x[i], &mut dbasis)?;
            }
            for (j, &g) in dy.iter().enumerate() {
                if g == T::zero() || !self.is_kept(j, i) {
                    continue;
                }
                let off = self.edge_offset(j, i);
                for m in first..=last {
                    grads[off + m] += g * b[m];
                }
                if has_slope {
                    let slope: T = (0..nb).map(|m| coeffs[off + m] * dbasis[m]).sum();
                    dx[i] += g * slope;
                }
            }
        }
        Ok(dx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(n_in: usize, n_out: usize) -> (ParamStore<f64>, KanLayer<f64>) {
        let mut p = ParamStore::new();
        let l = KanLayer::new(&mut p, "kan", n_in, n_out, KnotGrid::on_unit_interval(2, 3).unwrap());
        (p, l)
    }

    #[test]
    fn zero_coeffs_zero_output() {
        let (p, l) = layer(3, 2);
        let mut c = KanCache::default();
        assert_eq!(l.forward(&p, &[0.1, -0.4, 0.9], &mut c).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn constant_edges_sum_n_in() {
        let (mut p, l) = layer(3, 2);
        p.get_mut(l.coeffs).iter_mut().for_each(|c| *c = 0.25);
        let mut c = KanCache::default();
        let y = l.forward(&p, &[0.1, -0.4, 0.9], &mut c).unwrap();
        for v in y {
            assert!((v - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_grad_is_basis() {
        let (mut p, l) = layer(1, 1);
        p.get_mut(l.coeffs).copy_from_slice(&[0.3, -0.1, 0.7, 0.2, 0.5]);
        let mut c = KanCache::default();
        l.forward(&p, &[0.2], &mut c).unwrap();
        l.backward(&mut p, &c, &[1.0]).unwrap();
        let basis = l.grid.basis_values(0.2);
        assert_eq!(p.grad(l.coeffs), basis.as_slice());
    }

    #[test]
    fn zero_upstream_zero_grads() {
        let (mut p, l) = layer(2, 2);
        p.get_mut(l.coeffs).iter_mut().enumerate().for_each(|(i, c)| *c = i as f64 * 0.1);
        let mut c = KanCache::default();
        l.forward(&p, &[0.2, -0.6], &mut c).unwrap();
        let dx = l.backward(&mut p, &c, &[0.0, 0.0]).unwrap();
        assert_eq!(dx, vec![0.0, 0.0]);
        assert!(p.grads().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn backward_without_forward_is_error() {
        let (mut p, l) = layer(2, 1);
        let c = KanCache::default();
        assert_eq!(l.backward(&mut p, &c, &[1.0]), Err(Error::StaleCache("kan layer")));
    }

    #[test]
    fn dimension_mismatch() {
        let (p, l) = layer(2, 1);
        let mut c = KanCache::default();
        assert!(matches!(
            l.forward(&p, &[0.0], &mut c),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
