//! Uniform B-spline knot grids and Cox–de Boor basis evaluation.
//!
//! Every grid spans `[lo, hi]` with `g` intervals and is extended `k` knots
//! beyond each bound, giving `g + k` basis functions of degree `k`. Inputs
//! are clamped to `[lo, hi]` before evaluation, so a spline extrapolates as
//! a constant.

use crate::error::{check_len, Error, Result};
use crate::scalar::Scalar;

/// Largest supported spline degree. Local evaluation uses fixed-size scratch.
pub const MAX_DEGREE: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct KnotGrid<T> {
    k: usize,
    g: usize,
    lo: T,
    hi: T,
    step: T,
    knots: Vec<T>,
}

impl<T: Scalar> KnotGrid<T> {
    pub fn uniform(k: usize, g: usize, lo: T, hi: T) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidConfig("grid needs at least one interval".into()));
        }
        if k > MAX_DEGREE {
            return Err(Error::InvalidConfig(format!(
                "spline degree {k} exceeds {MAX_DEGREE}"
            )));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidConfig("grid bounds must satisfy lo < hi".into()));
        }
        let step = (hi - lo) / T::lit(g as f64);
        let mut knots: Vec<T> = (0..g + 2 * k + 1)
            .map(|i| lo + (T::lit(i as f64) - T::lit(k as f64)) * step)
            .collect();
        knots[k] = lo;
        knots[g + k] = hi;
        Ok(Self {
            k,
            g,
            lo,
            hi,
            step,
            knots,
        })
    }

    /// The `[-1, 1]` grid used by every network layer.
    pub fn on_unit_interval(k: usize, g: usize) -> Result<Self> {
        Self::uniform(k, g, -T::one(), T::one())
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn intervals(&self) -> usize {
        self.g
    }

    pub fn n_basis(&self) -> usize {
        self.g + self.k
    }

    pub fn bounds(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    #[inline]
    pub fn clamp(&self, x: T) -> T {
        x.max(self.lo).min(self.hi)
    }

    #[inline]
    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Knot span `s` with `knots[s] <= x < knots[s + 1]`, for clamped `x`.
    /// The right bound belongs to the last span.
    fn span(&self, x: T) -> usize {
        let last = self.g + self.k - 1;
        if x >= self.hi {
            return last;
        }
        let raw = ((x - self.lo) / self.step).floor().to_usize().unwrap_or(0);
        let mut s = (self.k + raw).clamp(self.k, last);
        while s > self.k && x < self.knots[s] {
            s -= 1;
        }
        while s < last && x >= self.knots[s + 1] {
            s += 1;
        }
        s
    }

    /// Nonzero degree-`p` basis values at span `s`, for indices `s-p ..= s`.
    fn local_basis(&self, s: usize, x: T, p: usize, out: &mut [T; MAX_DEGREE + 1]) {
        let mut left = [T::zero(); MAX_DEGREE + 1];
        let mut right = [T::zero(); MAX_DEGREE + 1];
        out[0] = T::one();
        for j in 1..=p {
            left[j] = x - self.knots[s + 1 - j];
            right[j] = self.knots[s + j] - x;
            let mut saved = T::zero();
            for r in 0..j {
                let temp = out[r] / (right[r + 1] + left[j - r]);
                out[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            out[j] = saved;
        }
    }

    /// Writes all `g + k` basis values at `x` into `out` and returns the
    /// index of the first possibly-nonzero entry. At most `k + 1` entries,
    /// starting there, are nonzero.
    pub fn basis_into(&self, x: T, out: &mut [T]) -> usize {
        debug_assert_eq!(out.len(), self.n_basis());
        out.iter_mut().for_each(|v| *v = T::zero());
        let x = self.clamp(x);
        let s = self.span(x);
        let mut local = [T::zero(); MAX_DEGREE + 1];
        self.local_basis(s, x, self.k, &mut local);
        let first = s - self.k;
        out[first..=s].copy_from_slice(&local[..=self.k]);
        first
    }

    pub fn basis_values(&self, x: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_basis()];
        self.basis_into(x, &mut out);
        out
    }

    /// Writes dN_i/dx at `x` into `out`. Outside `[lo, hi]` the clamped
    /// spline is constant, so every derivative is zero there.
    pub fn basis_derivatives_into(&self, x: T, out: &mut [T]) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroDegreeDerivative);
        }
        check_len("basis derivative buffer", self.n_basis(), out.len())?;
        out.iter_mut().for_each(|v| *v = T::zero());
        if !self.contains(x) {
            return Ok(());
        }
        let k = self.k;
        let s = self.span(x);
        let mut lower = [T::zero(); MAX_DEGREE + 1];
        // degree k-1 values for indices s-k+1 ..= s
        self.local_basis(s, x, k - 1, &mut lower);
        let kk = T::lit(k as f64);
        let t = &self.knots;
        for i in s - k..=s {
            // N_{i,k-1} lives at local index i-(s-k+1), if in range
            let n_i = if i > s - k { lower[i - (s - k + 1)] } else { T::zero() };
            let n_next = if i < s { lower[i + 1 - (s - k + 1)] } else { T::zero() };
            let a = if n_i != T::zero() { n_i / (t[i + k] - t[i]) } else { T::zero() };
            let b = if n_next != T::zero() {
                n_next / (t[i + k + 1] - t[i + 1])
            } else {
                T::zero()
            };
            out[i] = kk * (a - b);
        }
        Ok(())
    }

    pub fn basis_derivatives(&self, x: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.n_basis()];
        self.basis_derivatives_into(x, &mut out)?;
        Ok(out)
    }

    /// Σ_i coeffs[i] · N_i(x).
    pub fn eval_spline(&self, coeffs: &[T], x: T) -> Result<T> {
        check_len("spline coefficients", self.n_basis(), coeffs.len())?;
        let mut basis = vec![T::zero(); self.n_basis()];
        let first = self.basis_into(x, &mut basis);
        let last = (first + self.k).min(self.n_basis() - 1);
        Ok((first..=last).map(|i| coeffs[i] * basis[i]).sum())
    }
}
