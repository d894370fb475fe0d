use crate::error::{Error, Result};

pub const DEFAULT_CLASSES: usize = 5;

/// Empirical quantile of sorted data with linear interpolation between order
/// statistics (position `(n - 1) * p`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Breakpoints at the 1/k, ..., (k-1)/k quantiles of the non-null values.
///
/// Equal breakpoints are collapsed, and a breakpoint at the maximum is
/// dropped since the class above it would be empty. The result is strictly
/// increasing and may hold fewer than `k - 1` entries.
pub fn quantile_classes(values: &[Option<f64>], k: usize) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "need at least 2 classes, got {k}"
        )));
    }
    let mut data: Vec<f64> = values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    if data.is_empty() {
        return Err(Error::Precondition(
            "cannot class an all-null variable".into(),
        ));
    }
    data.sort_by(f64::total_cmp);
    let max = data[data.len() - 1];
    let mut breaks: Vec<f64> = Vec::with_capacity(k - 1);
    for i in 1..k {
        let b = quantile(&data, i as f64 / k as f64);
        if b < max && breaks.last().is_none_or(|last| b > *last) {
            breaks.push(b);
        }
    }
    Ok(breaks)
}

/// Class index of a value: the number of breakpoints strictly below it.
/// Class `i` covers `(breaks[i-1], breaks[i]]`.
pub fn class_of(breaks: &[f64], value: f64) -> usize {
    breaks.partition_point(|b| *b < value)
}
