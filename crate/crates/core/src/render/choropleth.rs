use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::json;

use super::classes::{class_of, quantile_classes, DEFAULT_CLASSES};
use super::palette::Palette;
use super::svg::{escape, header, label, Projection};
use super::CANVAS;
use crate::error::{Error, Result};
use crate::geo::geojson::multipolygon_json;
use crate::geo::ZoneSet;

const MARGIN: f64 = 20.0;
const MAP_TOP: f64 = 60.0;
const MAP_HEIGHT: f64 = 800.0;
const LEGEND_TOP: f64 = 876.0;
const LEGEND_ROWS: usize = 5;
const LEGEND_ROW: f64 = 22.0;
const LEGEND_COL: f64 = 240.0;
const MAX_CIRCLE_RADIUS: f64 = 30.0;
const NULL_FILL: &str = "url(#nodata)";
const OUTLINE: &str = "#636363";

#[derive(Debug, Clone, PartialEq)]
pub struct MapOptions {
    pub classes: usize,
    pub palette: Palette,
    /// Overlay a circle per zone with area proportional to the value.
    pub circles: bool,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions {
            classes: DEFAULT_CLASSES,
            palette: Palette::default(),
            circles: false,
        }
    }
}

/// A variable classed over every zone of a zone set.
#[derive(Debug, Clone)]
pub struct Choropleth<'a> {
    zones: &'a ZoneSet,
    variable: String,
    breaks: Vec<f64>,
    range: Option<(f64, f64)>,
    values: BTreeMap<String, Option<f64>>,
}

impl<'a> Choropleth<'a> {
    /// Zones absent from `values` are treated as null; keys that are not
    /// zones of the set are an error.
    pub fn new(
        zones: &'a ZoneSet,
        variable: impl Into<String>,
        values: &BTreeMap<String, Option<f64>>,
        k: usize,
    ) -> Result<Self> {
        if let Some(zip) = values.keys().find(|z| !zones.contains_zip(z)) {
            return Err(Error::UnknownZip {
                context: "choropleth values",
                zip: zip.clone(),
            });
        }
        let values: BTreeMap<String, Option<f64>> = zones
            .zip_ids()
            .map(|z| {
                let v = values.get(z).copied().flatten().filter(|v| v.is_finite());
                (z.to_string(), v)
            })
            .collect();
        let data: Vec<Option<f64>> = values.values().copied().collect();
        let present: Vec<f64> = data.iter().flatten().copied().collect();
        let (breaks, range) = if present.is_empty() {
            if k < 2 {
                return Err(Error::Precondition(format!(
                    "need at least 2 classes, got {k}"
                )));
            }
            (Vec::new(), None)
        } else {
            let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (quantile_classes(&data, k)?, Some((lo, hi)))
        };
        Ok(Choropleth {
            zones,
            variable: variable.into(),
            breaks,
            range,
            values,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// Number of classes in use; zero when every value is null.
    pub fn class_count(&self) -> usize {
        if self.range.is_some() {
            self.breaks.len() + 1
        } else {
            0
        }
    }

    pub fn value(&self, zip: &str) -> Option<f64> {
        self.values.get(zip).copied().flatten()
    }

    pub fn class_of(&self, zip: &str) -> Option<usize> {
        self.value(zip).map(|v| class_of(&self.breaks, v))
    }

    fn class_label(&self, class: usize) -> String {
        let (lo, hi) = self.range.expect("classes exist only with data");
        let lower = if class == 0 {
            lo
        } else {
            self.breaks[class - 1]
        };
        let upper = self.breaks.get(class).copied().unwrap_or(hi);
        if lower == upper {
            label(lower)
        } else {
            format!("{} to {}", label(lower), label(upper))
        }
    }

    /// FeatureCollection with one feature per zone, ordered by zip id.
    pub fn to_geojson(&self) -> String {
        let features: Vec<_> = self
            .zones
            .zones()
            .iter()
            .map(|z| {
                json!({
                    "type": "Feature",
                    "properties": {
                        "zip_id": z.zip_id(),
                        "value": self.value(z.zip_id()),
                        "class": self.class_of(z.zip_id()),
                    },
                    "geometry": multipolygon_json(z.polygons()),
                })
            })
            .collect();
        let doc = json!({
            "type": "FeatureCollection",
            "variable": self.variable,
            "breakpoints": self.breaks,
            "features": features,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn to_svg(&self, opts: &MapOptions) -> String {
        let proj = Projection::fit(
            self.zones.bbox(),
            MARGIN,
            MAP_TOP,
            CANVAS - 2.0 * MARGIN,
            MAP_HEIGHT,
        );
        let classes = self.class_count();
        let fill = |zip: &str| match self.class_of(zip) {
            Some(c) => opts.palette.shade(c, classes).to_string(),
            None => NULL_FILL.to_string(),
        };

        let mut out = String::new();
        header(&mut out, CANVAS, CANVAS);
        out.push_str(concat!(
            "<defs>\n",
            r##"<pattern id="nodata" width="8" height="8" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"##,
            r##"<rect width="8" height="8" fill="#e0e0e0"/><line x1="0" y1="0" x2="0" y2="8" stroke="#9e9e9e" stroke-width="3"/>"##,
            "</pattern>\n</defs>\n",
            r##"<rect width="100%" height="100%" fill="#ffffff"/>"##,
            "\n"
        ));
        let _ = writeln!(
            out,
            r#"<text x="{MARGIN:.2}" y="38.00" font-size="22">{}</text>"#,
            escape(&self.variable)
        );

        let _ = writeln!(
            out,
            r#"<g stroke="{OUTLINE}" stroke-width="0.60" fill-rule="evenodd">"#
        );
        for z in self.zones.zones() {
            let zip = z.zip_id();
            let value = self
                .value(zip)
                .map(label)
                .unwrap_or_else(|| "no data".into());
            let _ = writeln!(
                out,
                r#"<path id="zip-{zip}" fill="{}" d="{}"><title>{zip}: {value}</title></path>"#,
                fill(zip),
                proj.path(z.polygons()).trim_end()
            );
        }
        out.push_str("</g>\n");

        if opts.circles {
            self.circles(&mut out, &proj);
        }
        self.legend(&mut out, opts.palette);
        out.push_str("</svg>\n");
        out
    }

    fn circles(&self, out: &mut String, proj: &Projection) {
        let max = match self.range {
            Some((_, hi)) if hi > 0.0 => hi,
            _ => return,
        };
        let _ = writeln!(
            out,
            r##"<g fill="#000000" fill-opacity="0.25" stroke="#000000" stroke-width="0.80">"##
        );
        for z in self.zones.zones() {
            if let Some(v) = self.value(z.zip_id()).filter(|v| *v > 0.0) {
                let (cx, cy) = proj.anchor(z.polygons());
                let r = MAX_CIRCLE_RADIUS * (v / max).sqrt();
                let _ = writeln!(out, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}"/>"#);
            }
        }
        out.push_str("</g>\n");
    }

    fn legend(&self, out: &mut String, palette: Palette) {
        let classes = self.class_count();
        let mut entries: Vec<(String, String)> = (0..classes)
            .map(|c| (palette.shade(c, classes).to_string(), self.class_label(c)))
            .collect();
        if self.values.values().any(Option::is_none) {
            entries.push((NULL_FILL.to_string(), "no data".to_string()));
        }
        out.push_str("<g font-size=\"14\">\n");
        for (i, (fill, text)) in entries.iter().enumerate() {
            let x = MARGIN + (i / LEGEND_ROWS) as f64 * LEGEND_COL;
            let y = LEGEND_TOP + (i % LEGEND_ROWS) as f64 * LEGEND_ROW;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="18.00" height="18.00" fill="{fill}" stroke="{OUTLINE}" stroke-width="0.60"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                x + 26.0,
                y + 14.0,
                escape(text)
            );
        }
        out.push_str("</g>\n");
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedMap {
    pub geojson: String,
    pub svg: String,
}

pub fn render_choropleth(
    zones: &ZoneSet,
    variable: &str,
    values: &BTreeMap<String, Option<f64>>,
    opts: &MapOptions,
) -> Result<RenderedMap> {
    let map = Choropleth::new(zones, variable, values, opts.classes)?;
    Ok(RenderedMap {
        geojson: map.to_geojson(),
        svg: map.to_svg(opts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::test_util::rect_zone;

    fn strip() -> ZoneSet {
        ZoneSet::new(
            (0..4)
                .map(|i| {
                    let x = -71.1 + i as f64 * 0.01;
                    rect_zone(&format!("0210{i}"), x, 42.3, x + 0.01, 42.31)
                })
                .collect(),
        )
        .unwrap()
    }

    fn vals(v: &[(&str, Option<f64>)]) -> BTreeMap<String, Option<f64>> {
        v.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn every_zone_appears_once() {
        let zs = strip();
        let map = render_choropleth(
            &zs,
            "location_count",
            &vals(&[
                ("02100", Some(1.0)),
                ("02101", Some(5.0)),
                ("02103", Some(9.0)),
            ]),
            &MapOptions::default(),
        )
        .unwrap();
        let doc: serde_json::Value = serde_json::from_str(&map.geojson).unwrap();
        let feats = doc["features"].as_array().unwrap();
        assert_eq!(feats.len(), 4);
        assert_eq!(feats[2]["properties"]["zip_id"], "02102");
        assert!(feats[2]["properties"]["value"].is_null());
        assert!(feats[2]["properties"]["class"].is_null());
        for z in zs.zip_ids() {
            assert_eq!(map.svg.matches(&format!("id=\"zip-{z}\"")).count(), 1);
        }
        assert!(map.svg.contains("url(#nodata)\" d="));
        assert!(map.svg.contains(">no data</text>"));
    }

    #[test]
    fn darker_for_higher_values() {
        let zs = strip();
        let v = vals(&[
            ("02100", Some(1.0)),
            ("02101", Some(2.0)),
            ("02102", Some(3.0)),
            ("02103", Some(4.0)),
        ]);
        let c = Choropleth::new(&zs, "x", &v, 4).unwrap();
        assert_eq!(c.class_count(), 4);
        let svg = c.to_svg(&MapOptions::default());
        let stops = Palette::Blues.stops();
        assert!(svg.contains(&format!("id=\"zip-02100\" fill=\"{}\"", stops[0])));
        assert!(svg.contains(&format!("id=\"zip-02103\" fill=\"{}\"", stops[4])));
    }

    #[test]
    fn unknown_zip_is_named() {
        let err = Choropleth::new(&strip(), "x", &vals(&[("99999", Some(1.0))]), 5).unwrap_err();
        assert!(err.to_string().contains("99999"));
    }

    #[test]
    fn all_null_hatches_everything() {
        let zs = strip();
        let c = Choropleth::new(&zs, "x", &BTreeMap::new(), 5).unwrap();
        assert_eq!(c.class_count(), 0);
        let svg = c.to_svg(&MapOptions::default());
        assert_eq!(svg.matches("fill=\"url(#nodata)\" d=").count(), 4);
        assert_eq!(svg.matches("<rect x=").count(), 1);
    }

    #[test]
    fn single_zone_is_darkest() {
        let zs = ZoneSet::new(vec![rect_zone("02108", -71.1, 42.3, -71.0, 42.4)]).unwrap();
        let c = Choropleth::new(&zs, "x", &vals(&[("02108", Some(3.0))]), 5).unwrap();
        assert_eq!(c.class_count(), 1);
        assert!(c
            .to_svg(&MapOptions::default())
            .contains("fill=\"#08519c\" d="));
    }

    #[test]
    fn circles_only_when_requested() {
        let zs = strip();
        let v = vals(&[
            ("02100", Some(4.0)),
            ("02101", Some(1.0)),
            ("02102", Some(0.0)),
        ]);
        let plain = render_choropleth(&zs, "x", &v, &MapOptions::default()).unwrap();
        assert!(!plain.svg.contains("<circle"));
        let opts = MapOptions {
            circles: true,
            ..MapOptions::default()
        };
        let dots = render_choropleth(&zs, "x", &v, &opts).unwrap();
        assert_eq!(dots.svg.matches("<circle").count(), 2);
        assert!(dots.svg.contains("r=\"30.00\""));
        assert!(dots.svg.contains("r=\"15.00\""));
    }

    #[test]
    fn output_is_stable() {
        let zs = strip();
        let v = vals(&[("02100", Some(0.25)), ("02101", Some(0.5))]);
        let a = render_choropleth(&zs, "vacancy_rate", &v, &MapOptions::default()).unwrap();
        let b = render_choropleth(&zs, "vacancy_rate", &v.clone(), &MapOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
