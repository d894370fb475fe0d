use std::fmt::Write;

use crate::geo::{BoundingBox, GeoPoint, Polygon};

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Compact label for a data value.
pub(crate) fn label(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub(crate) fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
}

/// Equirectangular fit of a lon/lat box into a pixel frame, preserving the
/// ground aspect ratio at the box's middle latitude.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Projection {
    bbox: BoundingBox,
    x_scale: f64,
    y_scale: f64,
    x0: f64,
    y0: f64,
}

impl Projection {
    pub(crate) fn fit(
        bbox: BoundingBox,
        left: f64,
        top: f64,
        width: f64,
        height: f64,
    ) -> Projection {
        let mid = libm::cos(((bbox.min_lat + bbox.max_lat) / 2.0).to_radians());
        let ground_w = (bbox.max_lon - bbox.min_lon) * mid;
        let ground_h = bbox.max_lat - bbox.min_lat;
        let s = (width / ground_w).min(height / ground_h);
        let x0 = left + (width - ground_w * s) / 2.0;
        let y0 = top + (height - ground_h * s) / 2.0;
        Projection {
            bbox,
            x_scale: s * mid,
            y_scale: s,
            x0,
            y0,
        }
    }

    pub(crate) fn project(&self, p: &GeoPoint) -> (f64, f64) {
        (
            self.x0 + (p.lon() - self.bbox.min_lon) * self.x_scale,
            self.y0 + (self.bbox.max_lat - p.lat()) * self.y_scale,
        )
    }

    /// SVG path data for a set of polygon parts, holes included; render with
    /// `fill-rule="evenodd"`.
    pub(crate) fn path(&self, polygons: &[Polygon]) -> String {
        let mut d = String::new();
        for ring in polygons.iter().flat_map(Polygon::rings) {
            let pts = ring.points();
            for (i, p) in pts[..pts.len() - 1].iter().enumerate() {
                let (x, y) = self.project(p);
                let _ = write!(d, "{}{x:.2} {y:.2} ", if i == 0 { "M" } else { "L" });
            }
            d.push('Z');
        }
        d
    }

    /// Area-weighted centroid of the largest exterior ring, in pixels.
    pub(crate) fn anchor(&self, polygons: &[Polygon]) -> (f64, f64) {
        let mut best = (0.0, (0.0, 0.0));
        for poly in polygons {
            let pts: Vec<(f64, f64)> = poly
                .exterior
                .points()
                .iter()
                .map(|p| self.project(p))
                .collect();
            let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
            for w in pts.windows(2) {
                let cross = w[0].0 * w[1].1 - w[1].0 * w[0].1;
                a += cross;
                cx += (w[0].0 + w[1].0) * cross;
                cy += (w[0].1 + w[1].1) * cross;
            }
            if a.abs() > best.0 {
                best = (a.abs(), (cx / (3.0 * a), cy / (3.0 * a)));
            }
        }
        best.1
    }
}
