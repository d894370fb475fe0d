//! Minimal GeoJSON reading and writing for polygon feature collections.

use std::path::Path;

use serde_json::{json, Value};

use super::{GeoPoint, Polygon, ZipZone, ZoneSet};
use crate::error::{Error, Result};

pub const DEFAULT_ZIP_PROPERTY: &str = "ZIP5";

/// Polygon-bearing feature: id taken from a string property, coordinates as
/// polygon parts of rings.
#[derive(Debug, Clone)]
pub struct PolygonFeature {
    pub id: String,
    pub parts: Vec<Vec<Vec<GeoPoint>>>,
}

pub fn parse_polygon_features(text: &str, id_property: &str) -> Result<Vec<PolygonFeature>> {
    let doc: Value = serde_json::from_str(text)?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::Data(
            "GeoJSON root is not a FeatureCollection".into(),
        ));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Data("FeatureCollection without features array".into()))?;

    features
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let id = f
                .get("properties")
                .and_then(|p| p.get(id_property))
                .and_then(Value::as_str)
                .ok_or_else(|| {
                    Error::Data(format!(
                        "feature #{i} has no string property `{id_property}`"
                    ))
                })?
                .to_string();
            let geometry = f
                .get("geometry")
                .ok_or_else(|| Error::Data(format!("feature {id} has no geometry")))?;
            let coords = geometry.get("coordinates");
            let parts = match (geometry.get("type").and_then(Value::as_str), coords) {
                (Some("Polygon"), Some(c)) => vec![parse_rings(&id, c)?],
                (Some("MultiPolygon"), Some(Value::Array(polys))) => polys
                    .iter()
                    .map(|c| parse_rings(&id, c))
                    .collect::<Result<_>>()?,
                (t, _) => {
                    return Err(Error::Data(format!(
                        "feature {id}: unsupported geometry {}",
                        t.unwrap_or("<missing>")
                    )))
                }
            };
            Ok(PolygonFeature { id, parts })
        })
        .collect()
}

fn parse_rings(id: &str, value: &Value) -> Result<Vec<Vec<GeoPoint>>> {
    let bad = || Error::Data(format!("feature {id}: malformed polygon coordinates"));
    value
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|ring| {
            ring.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|pos| match pos.as_array().map(Vec::as_slice) {
                    Some([lon, lat, ..]) => {
                        GeoPoint::new(lon.as_f64().ok_or_else(bad)?, lat.as_f64().ok_or_else(bad)?)
                    }
                    _ => Err(bad()),
                })
                .collect()
        })
        .collect()
}

pub fn zones_from_geojson(text: &str, zip_property: &str) -> Result<ZoneSet> {
    let zones = parse_polygon_features(text, zip_property)?
        .into_iter()
        .map(|f| ZipZone::new(f.id, f.parts))
        .collect::<Result<Vec<_>>>()?;
    ZoneSet::new(zones)
}

pub fn load_zones(path: &Path, zip_property: &str) -> Result<ZoneSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    zones_from_geojson(&text, zip_property)
}

/// Geometry of polygon parts as a GeoJSON MultiPolygon value.
pub fn multipolygon_json(polygons: &[Polygon]) -> Value {
    let coords: Vec<Value> = polygons
        .iter()
        .map(|p| {
            Value::Array(
                p.rings()
                    .map(|r| {
                        Value::Array(
                            r.points()
                                .iter()
                                .map(|q| json!([q.lon(), q.lat()]))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        })
        .collect();
    json!({ "type": "MultiPolygon", "coordinates": coords })
}
