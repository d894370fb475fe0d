//! Assigns random points to zip zones through the R-tree index and checks
//! every answer against a brute-force scan.
//!
//!     cargo run --example spatial_join -- [n_points]

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use innodex::geo::geojson::{load_zones, DEFAULT_ZIP_PROPERTY};
use innodex::geo::GeoPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> innodex::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(10_000);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/boston_synth/zones.geojson");
    let zones = load_zones(&path, DEFAULT_ZIP_PROPERTY)?;
    let bbox = zones.bbox();
    println!("{} zones, bbox {}", zones.len(), bbox.to_param());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // pad the box so some points land outside every zone
    let points: Vec<GeoPoint> = (0..n)
        .map(|_| {
            GeoPoint::new(
                rng.random_range(bbox.min_lon - 0.01..bbox.max_lon + 0.01),
                rng.random_range(bbox.min_lat - 0.01..bbox.max_lat + 0.01),
            )
        })
        .collect::<innodex::Result<_>>()?;

    let start = Instant::now();
    let indexed: Vec<Option<&str>> = points.iter().map(|p| zones.assign_zone(p)).collect();
    let t_index = start.elapsed();
    let start = Instant::now();
    let scanned: Vec<Option<&str>> = points
        .iter()
        .map(|p| zones.assign_zone_exhaustive(p))
        .collect();
    let t_scan = start.elapsed();

    let disagreements = indexed.iter().zip(&scanned).filter(|(a, b)| a != b).count();
    let mut per_zip: BTreeMap<&str, usize> = BTreeMap::new();
    for z in indexed.iter().flatten() {
        *per_zip.entry(z).or_default() += 1;
    }
    let outside = indexed.iter().filter(|z| z.is_none()).count();

    println!("index: {t_index:?}  scan: {t_scan:?}  disagreements: {disagreements}");
    println!("outside every zone: {outside}");
    for (zip, count) in per_zip.iter().take(8) {
        let area = zones.get(zip).map_or(0.0, |z| z.area_km2());
        println!(
            "  {zip}  {count:>5} points  {area:>6.2} km2  {:>7.1} pts/km2",
            *count as f64 / area
        );
    }
    Ok(())
}
