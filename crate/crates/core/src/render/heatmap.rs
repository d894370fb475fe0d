use std::fmt::Write;

use super::palette::DivergingPalette;
use super::svg::{escape, header};
use super::CANVAS;
use crate::stats::CorrelationMatrix;

const LABEL_SPACE: f64 = 220.0;
const GRID: f64 = 700.0;
const BAR_X: f64 = 940.0;
const BAR_W: f64 = 20.0;
const BAR_STEPS: usize = 20;
const NULL_FILL: &str = "#bdbdbd";

/// Square heatmap of a correlation matrix. Cells are coloured on a diverging
/// ramp with white at zero and annotated with r to two decimals; null cells
/// are grey and left blank.
pub fn render_corr_heatmap(m: &CorrelationMatrix, palette: &DivergingPalette) -> String {
    let k = m.len().max(1);
    let cell = GRID / k as f64;
    let font = (cell * 0.28).min(18.0);
    // approximate glyph width of 0.6 em; shrink so the longest name fits
    let longest = m.columns.iter().map(|c| c.chars().count()).max().unwrap_or(1).max(1);
    let fit = (LABEL_SPACE - 20.0) / (0.6 * longest as f64);
    let label_font = (cell * 0.4).min(fit).clamp(6.0, 16.0);

    let mut out = String::new();
    header(&mut out, CANVAS, CANVAS);
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

    let _ = writeln!(out, r#"<g font-size="{label_font:.2}">"#);
    for (i, name) in m.columns.iter().enumerate() {
        let c = LABEL_SPACE + (i as f64 + 0.5) * cell;
        let name = escape(name);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{c:.2}" text-anchor="end" dominant-baseline="middle">{name}</text>"#,
            LABEL_SPACE - 8.0
        );
        let y = LABEL_SPACE - 8.0;
        let _ = writeln!(
            out,
            r#"<text x="{c:.2}" y="{y:.2}" text-anchor="end" transform="rotate(45 {c:.2} {y:.2})">{name}</text>"#
        );
    }
    out.push_str("</g>\n");

    let _ = writeln!(
        out,
        r##"<g stroke="#ffffff" stroke-width="1.00" font-size="{font:.2}" text-anchor="middle" dominant-baseline="middle">"##
    );
    for (i, row) in m.r.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            let x = LABEL_SPACE + j as f64 * cell;
            let y = LABEL_SPACE + i as f64 * cell;
            let fill = r
                .map(|r| palette.color(r).to_string())
                .unwrap_or_else(|| NULL_FILL.into());
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{fill}"/>"#
            );
            if let Some(r) = r {
                let ink = if palette.color(*r).luminance() < 0.5 {
                    "#ffffff"
                } else {
                    "#000000"
                };
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" fill="{ink}" stroke="none">{r:.2}</text>"#,
                    x + cell / 2.0,
                    y + cell / 2.0
                );
            }
        }
    }
    out.push_str("</g>\n");

    // colour bar from +1 at the top to -1 at the bottom
    let step = GRID / BAR_STEPS as f64;
    out.push_str("<g>\n");
    for s in 0..BAR_STEPS {
        let r = 1.0 - (s as f64 + 0.5) * 2.0 / BAR_STEPS as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{BAR_X:.2}" y="{:.2}" width="{BAR_W:.2}" height="{step:.2}" fill="{}"/>"#,
            LABEL_SPACE + s as f64 * step,
            palette.color(r)
        );
    }
    for (r, y) in [
        (1, LABEL_SPACE),
        (0, LABEL_SPACE + GRID / 2.0),
        (-1, LABEL_SPACE + GRID),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" font-size="14" dominant-baseline="middle">{r}</text>"#,
            BAR_X + BAR_W + 6.0
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
