//! Geometry primitives and the zone spatial join.
//!
//! Everything here works on a planar equirectangular approximation: longitudes
//! are scaled by the cosine of a reference latitude, latitudes are used as-is.
//! At city scale the error against a geodesic computation is far below the
//! resolution of the data we join. Trigonometry goes through `libm` so results
//! are identical on every platform.

mod area;
mod contain;
pub mod geojson;
mod zoneset;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use area::polygon_area_km2;
pub(crate) use contain::part_contains;
pub use contain::point_in_polygon;
pub use zoneset::ZoneSet;

/// Mean earth radius in kilometres (IUGG).
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Length of one degree of arc on the mean sphere, in kilometres.
pub const KM_PER_DEGREE: f64 = EARTH_RADIUS_KM * std::f64::consts::PI / 180.0;

/// A WGS84 longitude/latitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct GeoPoint {
    lon: f64,
    lat: f64,
}

#[derive(Deserialize)]
struct RawPoint {
    lon: f64,
    lat: f64,
}

impl TryFrom<RawPoint> for GeoPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        GeoPoint::new(raw.lon, raw.lat)
    }
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        if !(lon.is_finite() && lat.is_finite())
            || !(-180.0..=180.0).contains(&lon)
            || !(-90.0..=90.0).contains(&lat)
        {
            return Err(Error::InvalidPoint { lon, lat });
        }
        Ok(GeoPoint { lon, lat })
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    /// Planar distance in metres on an equirectangular projection centred
    /// between the two points.
    pub fn distance_m(&self, other: &GeoPoint) -> f64 {
        let mid_lat = 0.5 * (self.lat + other.lat);
        let dx = (self.lon - other.lon) * libm::cos(mid_lat.to_radians());
        let dy = self.lat - other.lat;
        (dx * dx + dy * dy).sqrt() * KM_PER_DEGREE * 1000.0
    }
}

/// Axis-aligned lon/lat rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BoundingBox {
    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Result<Self> {
        GeoPoint::new(min_lon, min_lat)?;
        GeoPoint::new(max_lon, max_lat)?;
        if !(min_lon < max_lon && min_lat < max_lat) {
            return Err(Error::Precondition(format!(
                "degenerate region [{min_lon}, {min_lat}, {max_lon}, {max_lat}]"
            )));
        }
        Ok(BoundingBox {
            min_lon,
            min_lat,
            max_lon,
            max_lat,
        })
    }

    pub(crate) fn of_points<'a>(points: impl IntoIterator<Item = &'a GeoPoint>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = BoundingBox {
            min_lon: first.lon,
            min_lat: first.lat,
            max_lon: first.lon,
            max_lat: first.lat,
        };
        for p in it {
            bb.min_lon = bb.min_lon.min(p.lon);
            bb.min_lat = bb.min_lat.min(p.lat);
            bb.max_lon = bb.max_lon.max(p.lon);
            bb.max_lat = bb.max_lat.max(p.lat);
        }
        Some(bb)
    }

    pub fn contains(&self, p: &GeoPoint) -> bool {
        (self.min_lon..=self.max_lon).contains(&p.lon)
            && (self.min_lat..=self.max_lat).contains(&p.lat)
    }

    /// Stable textual form used in source request keys: six decimals,
    /// `min_lon,min_lat,max_lon,max_lat`.
    pub fn to_param(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6},{:.6}",
            self.min_lon, self.min_lat, self.max_lon, self.max_lat
        )
    }
}

/// A closed ring: at least four points, first equal to last.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring(Vec<GeoPoint>);

impl Ring {
    fn new(points: Vec<GeoPoint>) -> std::result::Result<Self, String> {
        if points.len() < 4 {
            return Err(format!("ring has {} points, need at least 4", points.len()));
        }
        if points.first() != points.last() {
            return Err("ring is not closed".to_string());
        }
        Ok(Ring(points))
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.0
    }

    /// Consecutive vertex pairs, closing edge included.
    pub fn edges(&self) -> impl Iterator<Item = (&GeoPoint, &GeoPoint)> {
        self.0.windows(2).map(|w| (&w[0], &w[1]))
    }
}

/// One polygon part: an exterior ring and zero or more holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub exterior: Ring,
    pub holes: Vec<Ring>,
}

impl Polygon {
    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }
}

/// A zip code area.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipZone {
    zip_id: String,
    polygons: Vec<Polygon>,
    area_km2: f64,
}

impl ZipZone {
    /// Builds a zone from GeoJSON-style nested coordinates: a list of polygon
    /// parts, each a list of rings with the exterior first.
    pub fn new(zip_id: impl Into<String>, parts: Vec<Vec<Vec<GeoPoint>>>) -> Result<Self> {
        let zip_id = zip_id.into();
        if zip_id.len() != 5 || !zip_id.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidGeometry {
                zone: zip_id,
                reason: "zip id must be 5 digits".into(),
            });
        }
        let polygons = validate_parts(&zip_id, parts)?;
        let mut zone = ZipZone {
            zip_id,
            polygons,
            area_km2: 0.0,
        };
        zone.area_km2 = polygon_area_km2(&zone);
        Ok(zone)
    }

    pub fn zip_id(&self) -> &str {
        &self.zip_id
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn area_km2(&self) -> f64 {
        self.area_km2
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::of_points(self.polygons.iter().flat_map(|p| p.exterior.points()))
            .expect("validated rings are non-empty")
    }

    pub fn contains(&self, p: &GeoPoint) -> bool {
        point_in_polygon(p, self)
    }
}

/// Validates nested ring coordinates, naming `owner` in any error. Shared with
/// tract geometries, which follow the same rules without the zip id format.
pub(crate) fn validate_parts(owner: &str, parts: Vec<Vec<Vec<GeoPoint>>>) -> Result<Vec<Polygon>> {
    if parts.is_empty() {
        return Err(Error::InvalidGeometry {
            zone: owner.to_string(),
            reason: "no polygons".into(),
        });
    }
    parts
        .into_iter()
        .map(|rings| {
            let mut rings = rings
                .into_iter()
                .map(Ring::new)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|reason| Error::InvalidGeometry {
                    zone: owner.to_string(),
                    reason,
                })?;
            if rings.is_empty() {
                return Err(Error::InvalidGeometry {
                    zone: owner.to_string(),
                    reason: "polygon without exterior ring".into(),
                });
            }
            let exterior = rings.remove(0);
            Ok(Polygon {
                exterior,
                holes: rings,
            })
        })
        .collect()
}
