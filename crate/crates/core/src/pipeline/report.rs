use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::metrics::ZipFeatureVector;
use crate::stats::LogLogFit;

pub const TOP_N: usize = 5;

/// The scaling diagnostic as persisted in `loglog.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLogReport {
    pub x: String,
    pub y: String,
    pub fit: Option<LogLogFit>,
    /// Why there is no fit, when there is none.
    pub reason: Option<String>,
}

/// Zips with the largest non-null values of `column`, ties broken by zip id.
pub fn top_zips(rows: &[ZipFeatureVector], column: &str, n: usize) -> Vec<(String, f64)> {
    let mut ranked: Vec<(String, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.zip_id.clone(), r.column(column)??)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);
    ranked
}

fn fmt_value(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

/// Plain-text summary: the top zips for each innovation metric and the
/// log-log scaling diagnostic.
pub fn summary_report(rows: &[ZipFeatureVector], loglog: &LogLogReport, seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Neighborhood innovation index");
    let _ = writeln!(out, "zones: {}  seed: {seed}", rows.len());
    for metric in [
        "location_count",
        "total_rating_count",
        "weighted_mean_rating",
    ] {
        let _ = writeln!(out, "\nTop {TOP_N} zips by {metric}");
        let top = top_zips(rows, metric, TOP_N);
        if top.is_empty() {
            let _ = writeln!(out, "  (no data)");
        }
        for (i, (zip, v)) in top.iter().enumerate() {
            let _ = writeln!(out, "  {}. {zip}  {}", i + 1, fmt_value(*v));
        }
    }
    let _ = writeln!(out, "\nLog-log fit of {} on {}", loglog.y, loglog.x);
    match (&loglog.fit, &loglog.reason) {
        (Some(f), _) => {
            let _ = writeln!(
                out,
                "  slope {:.3}  intercept {:.3}  r2 {:.3}  n {}  ({})",
                f.slope,
                f.intercept,
                f.r2,
                f.n,
                if f.is_superlinear() {
                    "super-linear"
                } else {
                    "not super-linear"
                }
            );
        }
        (None, reason) => {
            let _ = writeln!(out, "  no fit: {}", reason.as_deref().unwrap_or("unknown"));
        }
    }
    out
}
