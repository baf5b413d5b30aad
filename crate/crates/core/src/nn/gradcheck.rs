use crate::error::{Error, Result};
use crate::nn::ParamStore;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport<T> {
    /// max over parameters of |analytic − numeric| / max(1, |numeric|)
    pub max_rel_error: T,
    pub worst_index: Option<usize>,
    pub worst_name: Option<String>,
}

/// Compares the analytic gradients held in `params` against central
/// differences of `loss` with step `h`.
///
/// `loss` is evaluated on a perturbed copy of `params`; it must be
/// deterministic.
pub fn finite_diff_check<T, F>(params: &ParamStore<T>, h: T, mut loss: F) -> Result<GradCheckReport<T>>
where
    T: Scalar,
    F: FnMut(&ParamStore<T>) -> Result<T>,
{
    if !(h > T::zero()) {
        return Err(Error::InvalidConfig("finite-difference step must be positive".into()));
    }
    let mut probe = params.clone();
    let two = T::lit(2.0);
    let mut worst = T::zero();
    let mut worst_index = None;
    for i in 0..params.len() {
        let w = params.values()[i];
        probe.values_mut()[i] = w + h;
        let plus = loss(&probe)?;
        probe.values_mut()[i] = w - h;
        let minus = loss(&probe)?;
        probe.values_mut()[i] = w;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite(format!(
                "loss during finite differences at parameter {i}"
            )));
        }
        let numeric = (plus - minus) / (two * h);
        let analytic = params.grads()[i];
        let rel = (analytic - numeric).abs() / numeric.abs().max(T::one());
        if rel > worst || worst_index.is_none() {
            worst = rel;
            worst_index = Some(i);
        }
    }
    Ok(GradCheckReport {
        max_rel_error: worst,
        worst_name: worst_index.and_then(|i| params.name_of(i).map(str::to_owned)),
        worst_index,
    })
}
