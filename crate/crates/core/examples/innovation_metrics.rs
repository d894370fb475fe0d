//! Zip-level innovation metrics from replayed POI sources, joined with jobs,
//! permits and census data into the feature matrix.
//!
//!     cargo run --example innovation_metrics

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use innodex::geo::geojson::{load_zones, DEFAULT_ZIP_PROPERTY};
use innodex::metrics::{
    assemble_feature_matrix, job_zip_counts, zip_innovation_metrics, FeatureInputs,
};
use innodex::poi::{
    dedupe, job_fetch, keyword_fetch, tag_fetch, CassetteStore, KeywordSet, Source, SourceClient,
    DEFAULT_TAGS,
};
use innodex::tabular::{
    build_crosswalk, filter_permits, load_tract_geometries, permit_zip_counts, read_census_csv,
    read_permits_csv, tract_to_zip, CensusColumns, CrosswalkOptions,
};
use innodex::Error;

fn open(path: &Path) -> innodex::Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn main() -> innodex::Result<()> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/boston_synth");
    let zones = load_zones(&fixture.join("zones.geojson"), DEFAULT_ZIP_PROPERTY)?;
    let region = zones.bbox();
    let store = CassetteStore::new(fixture.join("cassettes"));

    let keyword = SourceClient::replay(Source::KeywordSearch, store.clone());
    let mut pois = Vec::new();
    for term in KeywordSet::default().terms() {
        pois.extend(keyword_fetch(&keyword, term, &region)?);
    }
    let keyword_metrics = zip_innovation_metrics(&dedupe(pois), &zones);

    let tags: Vec<String> = DEFAULT_TAGS.iter().map(|s| s.to_string()).collect();
    let tagged = dedupe(tag_fetch(
        &SourceClient::replay(Source::TagQuery, store.clone()),
        &tags,
        &region,
    )?);
    let osm = zip_innovation_metrics(&tagged, &zones).coverage_counts();

    let postings = job_fetch(
        &SourceClient::replay(Source::Jobs, store),
        "technology",
        &region,
    )?;
    let jobs = job_zip_counts(&postings, &zones);

    let permits = filter_permits(&read_permits_csv(open(&fixture.join("permits.csv"))?)?);
    let permit_counts = permit_zip_counts(&permits, &zones);

    let tracts = load_tract_geometries(&fixture.join("tracts.geojson"), "GEOID")?;
    let xwalk = build_crosswalk(&tracts, &zones, &CrosswalkOptions::default())?;
    let census = read_census_csv(
        open(&fixture.join("census.csv"))?,
        &CensusColumns::default(),
    )?;
    let socio = tract_to_zip(&census, &xwalk.entries)?;

    let rows = assemble_feature_matrix(
        FeatureInputs {
            keyword: &keyword_metrics.by_zip,
            osm_counts: &osm,
            socio: &socio,
            permits: &permit_counts.by_zip,
            jobs: &jobs.by_zip,
        },
        &zones,
    )?;

    println!(
        "{} zips; {} keyword places outside every zone; {} postings without a zip",
        rows.len(),
        keyword_metrics.unassigned.location_count,
        jobs.without_zip
    );
    println!("zip    places ratings  mean  osm  jobs permits");
    let fmt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
    let mut by_places: BTreeMap<(std::cmp::Reverse<u64>, &str), _> = BTreeMap::new();
    for r in &rows {
        by_places.insert((std::cmp::Reverse(r.location_count), r.zip_id.as_str()), r);
    }
    for r in by_places.values().take(10) {
        println!(
            "{}  {:>6} {:>7} {:>5} {:>4} {:>5} {:>7}",
            r.zip_id,
            r.location_count,
            r.total_rating_count,
            r.weighted_mean_rating
                .map_or("-".into(), |m| format!("{m:.2}")),
            fmt(r.osm_location_count),
            fmt(r.job_count),
            r.permit_count
        );
    }
    Ok(())
}
