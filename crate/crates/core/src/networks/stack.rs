use crate::error::{Error, Result};
use crate::networks::kan::{KanCache, KanLayer};
use crate::networks::mlp::{MlpCache, MlpLayer};
use crate::nn::{ParamSlice, ParamStore};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Layer<T> {
    Kan(KanLayer<T>),
    Mlp(MlpLayer),
}

impl<T: Scalar> Layer<T> {
    pub fn n_in(&self) -> usize {
        match self {
            Layer::Kan(l) => l.n_in,
            Layer::Mlp(l) => l.n_in,
        }
    }

    pub fn n_out(&self) -> usize {
        match self {
            Layer::Kan(l) => l.n_out,
            Layer::Mlp(l) => l.n_out,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Layer::Kan(l) => l.param_count(),
            Layer::Mlp(l) => l.param_count(),
        }
    }

    pub fn param_slices(&self) -> Vec<ParamSlice> {
        match self {
            Layer::Kan(l) => vec![l.coeffs],
            Layer::Mlp(l) => vec![l.weights, l.biases],
        }
    }
}

#[derive(Debug, Clone)]
pub enum LayerCache<T> {
    Kan(KanCache<T>),
    Mlp(MlpCache<T>),
}

/// Reusable per-layer activations from the last forward pass.
#[derive(Debug, Clone, Default)]
pub struct StackCache<T> {
    layers: Vec<LayerCache<T>>,
}

impl<T> StackCache<T> {
    pub(crate) fn kan(&self, index: usize) -> Option<&KanCache<T>> {
        match self.layers.get(index) {
            Some(LayerCache::Kan(c)) => Some(c),
            _ => None,
        }
    }
}

/// Feed-forward composition of layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack<T> {
    pub layers: Vec<Layer<T>>,
}

impl<T: Scalar> Stack<T> {
    pub fn n_in(&self) -> usize {
        self.layers.first().map_or(0, Layer::n_in)
    }

    pub fn n_out(&self) -> usize {
        self.layers.last().map_or(0, Layer::n_out)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    pub fn param_slices(&self) -> Vec<ParamSlice> {
        self.layers.iter().flat_map(Layer::param_slices).collect()
    }

    pub fn forward(&self, params: &ParamStore<T>, x: &[T], cache: &mut StackCache<T>) -> Result<Vec<T>> {
        if cache.layers.len() != self.layers.len() {
            cache.layers = self
                .layers
                .iter()
                .map(|l| match l {
                    Layer::Kan(_) => LayerCache::Kan(KanCache::default()),
                    Layer::Mlp(_) => LayerCache::Mlp(MlpCache::default()),
                })
                .collect();
        }
        let mut h = x.to_vec();
        for (layer, c) in self.layers.iter().zip(cache.layers.iter_mut()) {
            h = match (layer, c) {
                (Layer::Kan(l), LayerCache::Kan(c)) => l.forward(params, &h, c)?,
                (Layer::Mlp(l), LayerCache::Mlp(c)) => l.forward(params, &h, c)?,
                _ => return Err(Error::StaleCache("layer kind changed")),
            };
        }
        Ok(h)
    }

    /// Accumulates parameter gradients and returns dL/dx.
    pub fn backward(&self, params: &mut ParamStore<T>, cache: &StackCache<T>, dy: &[T]) -> Result<Vec<T>> {
        if cache.layers.len() != self.layers.len() {
            return Err(Error::StaleCache("network stack"));
        }
        let mut g = dy.to_vec();
        for (layer, c) in self.layers.iter().zip(&cache.layers).rev() {
            g = match (layer, c) {
                (Layer::Kan(l), LayerCache::Kan(c)) => l.backward(params, c, &g)?,
                (Layer::Mlp(l), LayerCache::Mlp(c)) => l.backward(params, c, &g)?,
                _ => return Err(Error::StaleCache("layer kind changed")),
            };
        }
        Ok(g)
    }

    pub fn kan_layers(&self) -> impl Iterator<Item = (usize, &KanLayer<T>)> {
        self.layers.iter().enumerate().filter_map(|(i, l)| match l {
            Layer::Kan(k) => Some((i, k)),
            Layer::Mlp(_) => None,
        })
    }

    pub(crate) fn kan_layer_mut(&mut self, index: usize) -> Option<&mut KanLayer<T>> {
        match self.layers.get_mut(index) {
            Some(Layer::Kan(k)) => Some(k),
            _ => None,
        }
    }
}
