use super::{GeoPoint, Polygon, Ring, ZipZone};

/// Boundary-inclusive containment: true when `p` lies inside an exterior ring
/// and outside all of that part's holes, or on any ring's boundary.
///
/// Even-odd ray casting on raw lon/lat. The equirectangular scale factor is a
/// pure x-scaling, which leaves containment unchanged, so no projection is
/// needed here.
pub fn point_in_polygon(p: &GeoPoint, zone: &ZipZone) -> bool {
    zone.polygons().iter().any(|part| part_contains(p, part))
}

pub(crate) fn part_contains(p: &GeoPoint, polygon: &Polygon) -> bool {
    if polygon.rings().any(|r| on_boundary(p, r)) {
        return true;
    }
    polygon.rings().map(|r| crossings(p, r)).sum::<usize>() % 2 == 1
}

fn on_boundary(p: &GeoPoint, ring: &Ring) -> bool {
    ring.edges().any(|(a, b)| on_segment(p, a, b))
}

fn on_segment(p: &GeoPoint, a: &GeoPoint, b: &GeoPoint) -> bool {
    let (x, y) = (p.lon(), p.lat());
    if x < a.lon().min(b.lon())
        || x > a.lon().max(b.lon())
        || y < a.lat().min(b.lat())
        || y > a.lat().max(b.lat())
    {
        return false;
    }
    let cross = (b.lon() - a.lon()) * (y - a.lat()) - (b.lat() - a.lat()) * (x - a.lon());
    cross == 0.0
}

/// Number of edges crossed by a ray from `p` towards +lon. Each edge is
/// evaluated with its endpoints in canonical order, so an edge shared by two
/// zones gives the same answer for both and a point near it lands in exactly
/// one of them.
fn crossings(p: &GeoPoint, ring: &Ring) -> usize {
    let (x, y) = (p.lon(), p.lat());
    ring.edges()
        .filter(|(a, b)| {
            let (lo, hi) = if (a.lat(), a.lon()) <= (b.lat(), b.lon()) {
                (a, b)
            } else {
                (b, a)
            };
            // half-open in latitude
            if !(lo.lat() <= y && y < hi.lat()) {
                return false;
            }
            let t = (y - lo.lat()) / (hi.lat() - lo.lat());
            let x_at = lo.lon() + t * (hi.lon() - lo.lon());
            x < x_at
        })
        .count()
}
