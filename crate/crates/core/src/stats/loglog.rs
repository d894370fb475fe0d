use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Pairs with both values positive.
    pub n: usize,
}

impl LogLogFit {
    /// Slope above one: `y` grows faster than proportionally with `x`.
    pub fn is_superlinear(&self) -> bool {
        self.slope > 1.0
    }
}

/// Ordinary least squares of `ln y` on `ln x` over the pairs where both are
/// positive.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (libm::log(*a), libm::log(*b)))
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "log-log fit needs at least 3 positive pairs, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(lx, ly) in &pts {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
        syy += (ly - my) * (ly - my);
    }
    if sxx == 0.0 {
        return Err(Error::Precondition(
            "log-log fit needs at least two distinct x values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|&(lx, ly)| {
            let e = ly - (intercept + slope * lx);
            e * e
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LogLogFit {
        slope,
        intercept,
        r2,
        n,
    })
}
