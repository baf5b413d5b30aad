use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Handle to a contiguous run of parameters inside a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSlice {
    pub offset: usize,
    pub len: usize,
}

impl ParamSlice {
    #[inline]
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len
    }
}

/// Flat value/gradient arrays with named, disjoint views.
///
/// Slices are only ever appended, so they are disjoint and in bounds by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamStore<T> {
    values: Vec<T>,
    grads: Vec<T>,
    names: Vec<(String, ParamSlice)>,
}

impl<T: Scalar> Default for ParamStore<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ParamStore<T> {
    pub fn new() -> Self {
        Self {
            values: Vec::new(),
            grads: Vec::new(),
            names: Vec::new(),
        }
    }

    /// Appends `len` zero-initialised parameters under `name`.
    pub fn alloc(&mut self, name: impl Into<String>, len: usize) -> ParamSlice {
        let slice = ParamSlice {
            offset: self.values.len(),
            len,
        };
        self.values.resize(slice.offset + len, T::zero());
        self.grads.resize(slice.offset + len, T::zero());
        self.names.push((name.into(), slice));
        slice
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn grads(&self) -> &[T] {
        &self.grads
    }

    pub fn grads_mut(&mut self) -> &mut [T] {
        &mut self.grads
    }

    #[inline]
    pub fn get(&self, slice: ParamSlice) -> &[T] {
        &self.values[slice.range()]
    }

    #[inline]
    pub fn get_mut(&mut self, slice: ParamSlice) -> &mut [T] {
        &mut self.values[slice.range()]
    }

    #[inline]
    pub fn grad(&self, slice: ParamSlice) -> &[T] {
        &self.grads[slice.range()]
    }

    #[inline]
    pub fn grad_mut(&mut self, slice: ParamSlice) -> &mut [T] {
        &mut self.grads[slice.range()]
    }

    /// Values and gradients of one slice, borrowed together for backward passes.
    #[inline]
    pub fn split(&mut self, slice: ParamSlice) -> (&[T], &mut [T]) {
        let r = slice.range();
        (&self.values[r.clone()], &mut self.grads[r])
    }

    pub fn slices(&self) -> impl Iterator<Item = (&str, ParamSlice)> {
        self.names.iter().map(|(n, s)| (n.as_str(), *s))
    }

    /// Name of the slice owning flat index `index`.
    pub fn name_of(&self, index: usize) -> Option<&str> {
        self.names
            .iter()
            .find(|(_, s)| s.range().contains(&index))
            .map(|(n, _)| n.as_str())
    }

    pub fn zero_grads(&mut self) {
        self.grads.iter_mut().for_each(|g| *g = T::zero());
    }

    /// Replaces every value; the length must match.
    pub fn set_values(&mut self, values: &[T]) -> Result<()> {
        crate::error::check_len("parameter values", self.values.len(), values.len())?;
        self.values.copy_from_slice(values);
        Ok(())
    }

    pub fn grad_norm(&self) -> T {
        self.grads.iter().map(|&g| g * g).sum::<T>().sqrt()
    }

    /// Rescales gradients so their global L2 norm is at most `max_norm`.
    /// Returns the norm before clipping.
    pub fn clip_grad_norm(&mut self, max_norm: T) -> T {
        let norm = self.grad_norm();
        if norm > max_norm && norm > T::zero() {
            let scale = max_norm / norm;
            self.grads.iter_mut().for_each(|g| *g *= scale);
        }
        norm
    }

    /// First gradient entry that is NaN or infinite, reported by slice name.
    pub fn check_finite_grads(&self) -> Result<()> {
        match self.grads.iter().position(|g| !g.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::NonFinite(format!(
                "gradient of `{}` (index {i})",
                self.name_of(i).unwrap_or("?")
            ))),
        }
    }
}
