//! Builds the tract-to-zip crosswalk by sampling, compares it with exact
//! overlap areas, and reallocates tract census counts to zips.
//!
//!     cargo run --example crosswalk -- [samples_per_tract]

use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use innodex::geo::geojson::{load_zones, DEFAULT_ZIP_PROPERTY};
use innodex::tabular::{
    build_crosswalk, load_tract_geometries, read_census_csv, read_crosswalk_csv, tract_to_zip,
    CensusColumns, CrosswalkOptions,
};

fn main() -> innodex::Result<()> {
    let samples = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2000);
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/boston_synth");
    let zones = load_zones(&fixture.join("zones.geojson"), DEFAULT_ZIP_PROPERTY)?;
    let tracts = load_tract_geometries(&fixture.join("tracts.geojson"), "GEOID")?;

    let opts = CrosswalkOptions {
        samples_per_tract: samples,
        seed: 42,
    };
    let xwalk = build_crosswalk(&tracts, &zones, &opts)?;
    println!(
        "{} tracts, {} entries, {} partially outside",
        tracts.len(),
        xwalk.entries.len(),
        xwalk.partially_outside.len()
    );

    let exact = read_crosswalk_csv(
        File::open(fixture.join("crosswalk_exact.csv"))
            .map_err(|e| innodex::Error::io("crosswalk_exact.csv", e))?,
    )?;
    let sampled: HashMap<(&str, &str), f64> = xwalk
        .entries
        .iter()
        .map(|e| ((e.tract_id.as_str(), e.zip_id.as_str()), e.weight))
        .collect();
    let worst = exact
        .iter()
        .map(|e| {
            (sampled
                .get(&(e.tract_id.as_str(), e.zip_id.as_str()))
                .copied()
                .unwrap_or(0.0)
                - e.weight)
                .abs()
        })
        .fold(0.0, f64::max);
    println!("largest weight error vs exact areas at {samples} samples: {worst:.4}");

    let census = read_census_csv(
        File::open(fixture.join("census.csv")).map_err(|e| innodex::Error::io("census.csv", e))?,
        &CensusColumns::default(),
    )?;
    let zips = tract_to_zip(&census, &xwalk.entries)?;
    let tract_pop: u64 = census.iter().map(|t| t.pop_total).sum();
    let zip_pop: u64 = zips.iter().map(|z| z.pop_total).sum();
    println!("population: {tract_pop} in tracts, {zip_pop} in zips");
    for z in zips.iter().take(5) {
        println!(
            "  {}  pop {:>6}  white {:>5.1}%  vacancy {:>4.1}%  income {}",
            z.zip_id,
            z.pop_total,
            100.0 * z.pct_white.unwrap_or(f64::NAN),
            100.0 * z.vacancy_rate.unwrap_or(f64::NAN),
            z.median_income_usd
                .map_or("n/a".into(), |v| format!("{v:.0}"))
        );
    }
    Ok(())
}
