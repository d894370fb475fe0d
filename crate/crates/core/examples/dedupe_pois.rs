//! Replays recorded keyword searches and merges the repeated sightings of a
//! place into one record.
//!
//!     cargo run --example dedupe_pois

use std::path::Path;

use innodex::geo::geojson::{load_zones, DEFAULT_ZIP_PROPERTY};
use innodex::poi::{
    dedupe_with_warnings, keyword_fetch, CassetteStore, KeywordSet, Source, SourceClient,
};

fn main() -> innodex::Result<()> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/boston_synth");
    let zones = load_zones(&fixture.join("zones.geojson"), DEFAULT_ZIP_PROPERTY)?;
    let client = SourceClient::replay(
        Source::KeywordSearch,
        CassetteStore::new(fixture.join("cassettes")),
    );

    let mut raw = Vec::new();
    for term in KeywordSet::default().terms() {
        let hits = keyword_fetch(&client, term, &zones.bbox())?;
        println!("{term:>22}: {:>3} results", hits.len());
        raw.extend(hits);
    }

    let before = raw.len();
    let (records, warnings) = dedupe_with_warnings(raw);
    println!("{before} sightings -> {} places", records.len());
    for w in &warnings {
        println!(
            "  {} seen {:.0} m apart; kept the sighting with more ratings",
            w.place_id, w.distance_m
        );
    }

    let multi: Vec<_> = records
        .iter()
        .filter(|r| r.matched_terms.len() > 1)
        .collect();
    println!("{} places matched more than one term, e.g.", multi.len());
    for r in multi.iter().take(3) {
        println!("  {} {:?}", r.place_id, r.matched_terms);
    }
    Ok(())
}
