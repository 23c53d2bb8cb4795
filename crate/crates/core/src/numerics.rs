//! Log-domain helpers shared by the filter and consensus code.

/// Stand-in for a zero likelihood inside consensus tables.
///
/// IEEE `-inf` would turn `(-inf) - (-inf)` into NaN in the difference-form
/// updates, so zero likelihoods are clamped to this value instead.
pub const LOG_ZERO_SENTINEL: f64 = -1e300;

/// `log(sum(exp(x)))` with the maximum factored out. Returns `-inf` for an
/// empty slice or when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Shift `values` so that `log_sum_exp(values) == 0`. Returns the
/// normalizer that was subtracted, or `None` if every entry is `-inf`.
pub fn normalize_log_weights(values: &mut [f64]) -> Option<f64> {
    let lse = log_sum_exp(values);
    if !lse.is_finite() {
        return None;
    }
    for v in values.iter_mut() {
        *v -= lse;
    }
    Some(lse)
}

/// Replace `-inf` (and anything below the sentinel) with [`LOG_ZERO_SENTINEL`].
pub fn clamp_log(value: f64) -> f64 {
    if value < LOG_ZERO_SENTINEL {
        LOG_ZERO_SENTINEL
    } else {
        value
    }
}
