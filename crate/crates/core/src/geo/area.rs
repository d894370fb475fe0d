use super::{BoundingBox, Polygon, Ring, ZipZone, KM_PER_DEGREE};

/// Planar area of a zone in km²: outer rings minus holes, each polygon part
/// projected around the mean latitude of its exterior ring.
pub fn polygon_area_km2(zone: &ZipZone) -> f64 {
    zone.polygons().iter().map(part_area_km2).sum()
}

pub(crate) fn part_area_km2(polygon: &Polygon) -> f64 {
    let ext = polygon.exterior.points();
    // closing vertex excluded so the mean does not depend on the start vertex
    let open = &ext[..ext.len() - 1];
    let mean_lat = open.iter().map(|p| p.lat()).sum::<f64>() / open.len() as f64;
    let lon_scale = libm::cos(mean_lat.to_radians());
    let origin = BoundingBox::of_points(open).expect("non-empty ring");

    let holes: f64 = polygon
        .holes
        .iter()
        .map(|h| ring_area(h, &origin, lon_scale))
        .sum();
    (ring_area(&polygon.exterior, &origin, lon_scale) - holes).max(0.0)
}

fn ring_area(ring: &Ring, origin: &BoundingBox, lon_scale: f64) -> f64 {
    let twice: f64 = ring
        .edges()
        .map(|(a, b)| {
            let (ax, ay) = (
                (a.lon() - origin.min_lon) * lon_scale,
                a.lat() - origin.min_lat,
            );
            let (bx, by) = (
                (b.lon() - origin.min_lon) * lon_scale,
                b.lat() - origin.min_lat,
            );
            ax * by - bx * ay
        })
        .sum();
    0.5 * twice.abs() * KM_PER_DEGREE * KM_PER_DEGREE
}
