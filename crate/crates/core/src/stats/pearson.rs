use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewer complete pairs than this gives a null coefficient.
pub const MIN_PAIRS: usize = 3;

// |r| within this distance of 1 is reported as exactly ±1. Rounding in the
// sums can leave an exactly affine pair a few ulps short of 1.
const UNIT_SNAP: f64 = 1e-12;

/// Sample statistics over the complete pairs of two columns, with n-1
/// denominators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairStats {
    pub n: usize,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov: f64,
    /// Null when `n < 3` or either column is constant on the complete pairs.
    pub r: Option<f64>,
}

fn usable(v: Option<f64>) -> Option<f64> {
    v.filter(|x| x.is_finite())
}

/// Pairwise-deletion statistics: entries where either side is null (or not
/// finite) are skipped.
pub fn pair_stats(x: &[Option<f64>], y: &[Option<f64>]) -> Result<PairStats> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some((usable(*a)?, usable(*b)?)))
        .collect();
    let n = pairs.len();
    if n == 0 {
        return Ok(PairStats {
            n,
            mean_x: f64::NAN,
            mean_y: f64::NAN,
            var_x: f64::NAN,
            var_y: f64::NAN,
            cov: f64::NAN,
            r: None,
        });
    }

    let nf = n as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(a, b) in &pairs {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }

    let constant = |sel: fn(&(f64, f64)) -> f64| pairs.iter().all(|p| sel(p) == sel(&pairs[0]));
    let degenerate = constant(|p| p.0) || constant(|p| p.1) || sxx == 0.0 || syy == 0.0;
    let r = if n < MIN_PAIRS || degenerate {
        None
    } else {
        let prod = sxx * syy;
        let norm = if prod.is_finite() && prod > 0.0 {
            prod.sqrt()
        } else {
            sxx.sqrt() * syy.sqrt()
        };
        let r = (sxy / norm).clamp(-1.0, 1.0);
        Some(if 1.0 - r.abs() <= UNIT_SNAP {
            r.signum()
        } else {
            r
        })
    };
    let denom = if n > 1 { nf - 1.0 } else { f64::NAN };
    Ok(PairStats {
        n,
        mean_x,
        mean_y,
        var_x: sxx / denom,
        var_y: syy / denom,
        cov: sxy / denom,
        r,
    })
}

/// Pearson correlation with pairwise deletion of nulls.
pub fn pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Result<Option<f64>> {
    Ok(pair_stats(x, y)?.r)
}
