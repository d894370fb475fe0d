//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use innodex::geo::geojson::{load_zones, DEFAULT_ZIP_PROPERTY};
use innodex::geo::{GeoPoint, ZipZone, ZoneSet};
use innodex::metrics::zip_innovation_metrics;
use innodex::poi::{dedupe, PoiRecord, Source};
use innodex::render::{class_of, quantile_classes, Choropleth};
use innodex::stats::{correlation_matrix_from_columns, loglog_slope, pearson};
use innodex::tabular::{
    build_crosswalk, load_tract_geometries, read_census_csv, tract_to_zip, CensusColumns,
    CrosswalkOptions, TractGeometry,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture() -> PathBuf {
    crate_dir().join("fixtures/boston_synth")
}

fn fixture_zones() -> ZoneSet {
    load_zones(&fixture().join("zones.geojson"), DEFAULT_ZIP_PROPERTY).expect("fixture zones load")
}

fn goldens() -> Value {
    let text = fs::read_to_string(fixture().join("expected_counts.json")).expect("goldens exist");
    serde_json::from_str(&text).expect("goldens parse")
}

fn pt(lon: f64, lat: f64) -> GeoPoint {
    GeoPoint::new(lon, lat).unwrap()
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<GeoPoint> {
    vec![pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1), pt(x0, y0)]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- 1

fn spatial_join_matches_scan() -> Check {
    let zones = fixture_zones();
    ensure(zones.len() == 35, || {
        format!("fixture has {} zones", zones.len())
    })?;
    let b = zones.bbox();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points: Vec<GeoPoint> = (0..10_000)
        .map(|_| {
            pt(
                rng.random_range(b.min_lon - 0.01..b.max_lon + 0.01),
                rng.random_range(b.min_lat - 0.01..b.max_lat + 0.01),
            )
        })
        .collect();
    let start = Instant::now();
    let indexed: Vec<Option<String>> = points
        .iter()
        .map(|p| zones.assign_zone(p).map(String::from))
        .collect();
    let elapsed = start.elapsed();
    let mut mismatches = 0;
    let mut inside = 0;
    for (p, got) in points.iter().zip(&indexed) {
        let want = zones.assign_zone_exhaustive(p);
        inside += want.is_some() as usize;
        if got.as_deref() != want {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || {
        format!("{mismatches} of 10000 points disagree")
    })?;
    ensure(elapsed < Duration::from_secs(5), || {
        format!("indexed join took {elapsed:?}")
    })?;
    Ok(format!(
        "10000/10000 agree ({inside} inside a zone), {elapsed:.2?}"
    ))
}

// ---------------------------------------------------------------- 2

fn random_records(rng: &mut ChaCha8Rng) -> Vec<PoiRecord> {
    let terms = [
        "incubator",
        "startups",
        "tech hub",
        "accelerators",
        "co-working space",
    ];
    let sources = [Source::KeywordSearch, Source::TagQuery];
    let distinct = rng.random_range(1..25);
    let mut out = Vec::new();
    for k in 0..distinct {
        let source = sources[rng.random_range(0..2)];
        let base = (rng.random_range(-71.1..-71.0), rng.random_range(42.3..42.4));
        for _ in 0..rng.random_range(1..5) {
            let n = rng.random_range(0..4u64) * rng.random_range(0..50u64);
            let picked: BTreeSet<String> = terms
                .iter()
                .filter(|_| rng.random_bool(0.4))
                .map(|t| t.to_string())
                .collect();
            out.push(PoiRecord {
                source,
                place_id: format!("P{k}"),
                name: format!("place {k}"),
                location: pt(base.0 + rng.random_range(-1e-4..1e-4), base.1),
                rating: (n > 0).then(|| rng.random_range(1.0..=5.0)),
                rating_count: n,
                matched_terms: picked,
            });
        }
    }
    out.shuffle(rng);
    out
}

fn dedupe_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = Vec::new();
    for case in 0..1000 {
        let raw = random_records(&mut rng);
        let once = dedupe(raw.clone());
        if dedupe(once.clone()) != once {
            violations.push(format!("case {case}: not idempotent"));
        }
        let mut groups: BTreeMap<(Source, String), Vec<&PoiRecord>> = BTreeMap::new();
        for r in &raw {
            groups
                .entry((r.source, r.place_id.clone()))
                .or_default()
                .push(r);
        }
        if once.len() != groups.len() {
            violations.push(format!(
                "case {case}: {} records for {} ids",
                once.len(),
                groups.len()
            ));
            continue;
        }
        for rec in &once {
            let group = &groups[&(rec.source, rec.place_id.clone())];
            let max = group.iter().map(|r| r.rating_count).max().unwrap();
            if rec.rating_count != max
                || !group
                    .iter()
                    .any(|r| r.rating_count == rec.rating_count && r.rating == rec.rating)
            {
                violations.push(format!(
                    "case {case}: {} rating count not conserved",
                    rec.place_id
                ));
            }
            let union: BTreeSet<String> = group
                .iter()
                .flat_map(|r| r.matched_terms.iter().cloned())
                .collect();
            if rec.matched_terms != union {
                violations.push(format!("case {case}: {} lost matched terms", rec.place_id));
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {}", violations.len(), violations[0])
    })?;
    Ok("1000 sets: idempotent, one record per id with its largest count, term unions kept".into())
}

// ---------------------------------------------------------------- 3

fn weighted_mean_oracle() -> Check {
    let zone = ZipZone::new("02100", vec![vec![rect(-71.1, 42.3, -71.0, 42.4)]]).unwrap();
    let zones = ZoneSet::new(vec![zone]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let k = rng.random_range(1..40);
        let pois: Vec<PoiRecord> = (0..k)
            .map(|i| {
                let n = if rng.random_bool(0.2) {
                    0
                } else {
                    rng.random_range(1..5000u64)
                };
                PoiRecord {
                    source: Source::KeywordSearch,
                    place_id: format!("P{i}"),
                    name: String::new(),
                    location: pt(
                        rng.random_range(-71.09..-71.01),
                        rng.random_range(42.31..42.39),
                    ),
                    rating: (n > 0).then(|| {
                        (rng.random_range(10..=50) as f64) / 10.0 + rng.random_range(0.0..0.01)
                    }),
                    rating_count: n,
                    matched_terms: BTreeSet::new(),
                }
            })
            .collect();
        let got = zip_innovation_metrics(&pois, &zones).by_zip[0].clone();
        ensure(got.location_count == k as u64, || {
            format!("case {case}: location count {}", got.location_count)
        })?;

        let rated: Vec<(f64, f64)> = pois
            .iter()
            .filter_map(|p| Some((p.rating?, p.rating_count as f64)))
            .collect();
        let total: f64 = rated.iter().map(|r| r.1).sum();
        ensure(got.total_rating_count as f64 == total, || {
            format!("case {case}: total {}", got.total_rating_count)
        })?;
        if rated.is_empty() {
            ensure(got.weighted_mean_rating.is_none(), || {
                format!("case {case}: mean without ratings")
            })?;
            continue;
        }
        // reverse-order summation so the oracle does not share rounding
        let direct = rated.iter().rev().map(|(r, n)| r * n).sum::<f64>() / total;
        let mean = got
            .weighted_mean_rating
            .ok_or(format!("case {case}: null mean"))?;
        let rel = ((mean - direct) / direct).abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-12, || format!("case {case}: {mean} vs {direct}"))?;
        let lo = rated.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let hi = rated.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
        ensure(lo <= mean && mean <= hi, || {
            format!("case {case}: {mean} outside [{lo}, {hi}]")
        })?;

        let doubled: Vec<PoiRecord> = pois
            .iter()
            .cloned()
            .map(|mut p| {
                p.rating_count *= 2;
                p
            })
            .collect();
        let again = zip_innovation_metrics(&doubled, &zones).by_zip[0].weighted_mean_rating;
        ensure(again == Some(mean), || {
            format!("case {case}: doubling moved mean {mean} to {again:?}")
        })?;
    }
    Ok(format!(
        "1000 zips, worst relative error {worst:.1e}, convex, doubling exact"
    ))
}

// ---------------------------------------------------------------- 4

fn reallocation_conserves() -> Check {
    let zones = fixture_zones();
    let tracts = load_tract_geometries(&fixture().join("tracts.geojson"), "GEOID")
        .map_err(|e| e.to_string())?;
    let census = read_census_csv(
        File::open(fixture().join("census.csv")).unwrap(),
        &CensusColumns::default(),
    )
    .map_err(|e| e.to_string())?;
    let xw = build_crosswalk(
        &tracts,
        &zones,
        &CrosswalkOptions {
            samples_per_tract: 2000,
            seed: 42,
        },
    )
    .map_err(|e| e.to_string())?;
    let zips = tract_to_zip(&census, &xw.entries).map_err(|e| e.to_string())?;
    let tract_total: i64 = census.iter().map(|t| t.pop_total as i64).sum();
    let zip_total: i64 = zips.iter().map(|z| z.pop_total as i64).sum();
    let gap = (tract_total - zip_total).abs();
    ensure(gap <= census.len() as i64, || {
        format!(
            "zip total {zip_total} vs tract total {tract_total} over {} tracts",
            census.len()
        )
    })?;

    // a square tract split in half by two zones, straight and diagonally
    let zone_pairs = [
        vec![
            ZipZone::new("02001", vec![vec![rect(-71.10, 42.30, -71.05, 42.34)]]).unwrap(),
            ZipZone::new("02002", vec![vec![rect(-71.05, 42.30, -71.00, 42.34)]]).unwrap(),
        ],
        vec![
            ZipZone::new(
                "02001",
                vec![vec![vec![
                    pt(-71.10, 42.30),
                    pt(-71.00, 42.30),
                    pt(-71.10, 42.34),
                    pt(-71.10, 42.30),
                ]]],
            )
            .unwrap(),
            ZipZone::new(
                "02002",
                vec![vec![vec![
                    pt(-71.00, 42.30),
                    pt(-71.00, 42.34),
                    pt(-71.10, 42.34),
                    pt(-71.00, 42.30),
                ]]],
            )
            .unwrap(),
        ],
    ];
    let mut worst = 0.0f64;
    for zs in zone_pairs {
        let halves = ZoneSet::new(zs).unwrap();
        let square = TractGeometry::new(
            "25025000100",
            vec![vec![rect(-71.10, 42.30, -71.00, 42.34)]],
        )
        .unwrap();
        for seed in 0..50 {
            let xw = build_crosswalk(
                std::slice::from_ref(&square),
                &halves,
                &CrosswalkOptions {
                    samples_per_tract: 2000,
                    seed,
                },
            )
            .map_err(|e| e.to_string())?;
            for e in &xw.entries {
                worst = worst.max((e.weight - 0.5).abs());
            }
            ensure(xw.entries.len() == 2, || {
                format!("seed {seed}: {} entries", xw.entries.len())
            })?;
        }
    }
    ensure(worst <= 0.03, || format!("bisected weight off by {worst}"))?;
    Ok(format!(
        "population gap {gap} over {} tracts; bisected weights within {worst:.4} of 0.5",
        census.len()
    ))
}

// ---------------------------------------------------------------- 5

/// Exact oracle: values are multiples of 1/16, so all sums are computed in
/// integers and only the final square root is rounded.
fn oracle_pearson(x: &[Option<i64>], y: &[Option<i64>]) -> Option<f64> {
    let pairs: Vec<(i128, i128)> = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)? as i128, (*b)? as i128)))
        .collect();
    let n = pairs.len() as i128;
    if n < 3 {
        return None;
    }
    let (sx, sy) = (
        pairs.iter().map(|p| p.0).sum::<i128>(),
        pairs.iter().map(|p| p.1).sum::<i128>(),
    );
    let sxx = pairs.iter().map(|p| p.0 * p.0).sum::<i128>();
    let syy = pairs.iter().map(|p| p.1 * p.1).sum::<i128>();
    let sxy = pairs.iter().map(|p| p.0 * p.1).sum::<i128>();
    let (dx, dy, num) = (n * sxx - sx * sx, n * syy - sy * sy, n * sxy - sx * sy);
    if dx == 0 || dy == 0 {
        return None;
    }
    Some(num as f64 / ((dx as f64) * (dy as f64)).sqrt())
}

fn pearson_correct() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let to_f = |v: &[Option<i64>]| {
        v.iter()
            .map(|a| a.map(|a| a as f64 / 16.0))
            .collect::<Vec<_>>()
    };
    for case in 0..1000 {
        let n = rng.random_range(0..80);
        let spread = [2, 20, 20_000][rng.random_range(0..3)];
        let x: Vec<Option<i64>> = (0..n)
            .map(|_| (!rng.random_bool(0.15)).then(|| rng.random_range(-spread..=spread)))
            .collect();
        let slope = rng.random_range(-3..=3);
        let y: Vec<Option<i64>> = x
            .iter()
            .map(|a| {
                (!rng.random_bool(0.15))
                    .then(|| a.unwrap_or(0) * slope + rng.random_range(-spread..=spread))
            })
            .collect();
        let want = oracle_pearson(&x, &y);
        let got = pearson(&to_f(&x), &to_f(&y)).map_err(|e| e.to_string())?;
        match (got, want) {
            (None, None) => {}
            (Some(g), Some(w)) => {
                worst = worst.max((g - w).abs());
                ensure((g - w).abs() <= 1e-12, || {
                    format!("case {case}: {g} vs oracle {w}")
                })?;
            }
            _ => return Err(format!("case {case}: {got:?} vs oracle {want:?}")),
        }
    }

    for case in 0..300 {
        let k = rng.random_range(1..7);
        let cols: Vec<Vec<Option<f64>>> = (0..k)
            .map(|_| {
                (0..20)
                    .map(|_| (!rng.random_bool(0.2)).then(|| rng.random_range(-50.0..50.0)))
                    .collect()
            })
            .collect();
        let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
        let m = correlation_matrix_from_columns(&names, &cols).map_err(|e| e.to_string())?;
        for i in 0..k {
            ensure(m.r[i][i] == Some(1.0), || {
                format!("matrix {case}: diagonal {:?}", m.r[i][i])
            })?;
            for j in 0..k {
                ensure(
                    m.r[i][j].map(f64::to_bits) == m.r[j][i].map(f64::to_bits),
                    || format!("matrix {case}: asymmetric at ({i}, {j})"),
                )?;
            }
        }
    }

    for case in 0..1000 {
        let n = rng.random_range(3..60);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1e3..1e3)).collect();
        let a = rng.random_range(0.001..100.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let b = rng.random_range(-1e4..1e4);
        let y: Vec<Option<f64>> = x.iter().map(|v| Some(a * v + b)).collect();
        let xs: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
        let r = pearson(&xs, &y).map_err(|e| e.to_string())?;
        ensure(r == Some(a.signum()), || {
            format!("affine case {case}: {r:?} for slope {a}")
        })?;
    }
    Ok(format!("1000 vectors, worst error {worst:.1e}; 300 matrices symmetric with unit diagonal; 1000 affine cases exact"))
}

// ---------------------------------------------------------------- 6

fn superlinear_slope() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let x: Vec<f64> = (0..200).map(|_| rng.random_range(1.0..100.0)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| v.powf(1.3) * (1.0 + rng.random_range(-0.1..0.1)))
        .collect();
    let fit = loglog_slope(&x, &y).map_err(|e| e.to_string())?;
    ensure((fit.slope - 1.3).abs() <= 0.05, || {
        format!("slope {}", fit.slope)
    })?;
    ensure(fit.is_superlinear(), || "not flagged super-linear".into())?;
    Ok(format!("slope {:.4}, r2 {:.4}", fit.slope, fit.r2))
}

// ---------------------------------------------------------------- 7

fn run_pipeline(out: &Path) -> Result<Duration, String> {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_innodex"))
        .arg("--config")
        .arg(crate_dir().join("innodex.toml"))
        .arg("--output-dir")
        .arg(out)
        .arg("run")
        .env_remove("INNODEX_CASSETTE_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !o.status.success() {
        return Err(format!(
            "run failed: {}",
            String::from_utf8_lossy(&o.stderr)
        ));
    }
    Ok(elapsed)
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn end_to_end_deterministic() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let ta = run_pipeline(&a)?;
    let tb = run_pipeline(&b)?;
    ensure(ta.max(tb) < Duration::from_secs(30), || {
        format!("run took {:?}", ta.max(tb))
    })?;
    let (fa, fb) = (dir_bytes(&a), dir_bytes(&b));
    ensure(fa.keys().eq(fb.keys()), || {
        "runs produced different file sets".into()
    })?;
    let differing: Vec<&String> = fa
        .iter()
        .filter(|(k, v)| fb[*k] != **v)
        .map(|(k, _)| k)
        .collect();
    ensure(differing.is_empty(), || {
        format!("files differ: {differing:?}")
    })?;

    let manifest: Value =
        serde_json::from_slice(&fa["manifest.json"]).map_err(|e| e.to_string())?;
    let golden = goldens();
    let mut checked = 0;
    for (stage, counts) in golden["counts"].as_object().unwrap() {
        for (name, want) in counts.as_object().unwrap() {
            let got = &manifest["stages"][stage]["counts"][name];
            ensure(got == want, || {
                format!("{stage}.{name}: manifest {got}, golden {want}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "{} artifacts identical, slower run {:.2?}, {checked} golden counts match",
        fa.len(),
        ta.max(tb)
    ))
}

// ---------------------------------------------------------------- 8

fn output_contracts() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_pipeline(tmp.path())?;
    let zones = fixture_zones();
    let text = fs::read_to_string(tmp.path().join("features.jsonl")).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let ids: Vec<&str> = rows.iter().map(|r| r["zip_id"].as_str().unwrap()).collect();
    let zone_ids: Vec<&str> = zones.zip_ids().collect();
    ensure(ids == zone_ids, || {
        format!("feature rows {ids:?} do not match zones")
    })?;
    let csv_rows = fs::read_to_string(tmp.path().join("features.csv"))
        .unwrap()
        .lines()
        .count()
        - 1;
    ensure(csv_rows == zones.len(), || {
        format!("features.csv has {csv_rows} rows")
    })?;

    let by_zip: HashMap<&str, &Value> = ids.iter().copied().zip(&rows).collect();
    let facts = &goldens()["facts"];
    let list = |k: &str| -> Vec<String> {
        facts[k]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect()
    };
    let (no_pois, no_jobs, no_tags) = (
        list("zips_without_pois"),
        list("zips_without_jobs"),
        list("zips_without_tag_pois"),
    );
    ensure(!no_pois.is_empty() && !no_jobs.is_empty(), || {
        "fixture lacks empty zips".into()
    })?;
    for z in &no_pois {
        let r = by_zip[z.as_str()];
        ensure(
            r["location_count"] == 0
                && r["total_rating_count"] == 0
                && r["weighted_mean_rating"].is_null(),
            || format!("{z} without POIs: {r}"),
        )?;
    }
    for z in &no_jobs {
        ensure(by_zip[z.as_str()]["job_count"].is_null(), || {
            format!("{z} absent from jobs is not null")
        })?;
    }
    for z in &no_tags {
        ensure(by_zip[z.as_str()]["osm_location_count"].is_null(), || {
            format!("{z} absent from tags is not null")
        })?;
    }
    for (z, r) in &by_zip {
        if !no_jobs.iter().any(|n| n == z) {
            ensure(r["job_count"].as_u64().is_some_and(|v| v > 0), || {
                format!("{z} job count {}", r["job_count"])
            })?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..500 {
        let k = rng.random_range(2..9);
        let values: BTreeMap<String, Option<f64>> = zones
            .zip_ids()
            .map(|z| {
                let v = match rng.random_range(0..10) {
                    0 => None,
                    1 => Some(rng.random_range(0..3) as f64),
                    _ => Some(rng.random_range(-10.0..10.0f64).powi(3)),
                };
                (z.to_string(), v)
            })
            .collect();
        let map = Choropleth::new(&zones, "v", &values, k).map_err(|e| e.to_string())?;
        let breaks = quantile_classes(&values.values().copied().collect::<Vec<_>>(), k)
            .map_err(|e| e.to_string())?;
        ensure(map.breakpoints() == breaks.as_slice(), || {
            format!("case {case}: breakpoints differ")
        })?;
        let mut classed: Vec<(f64, usize)> = zones
            .zip_ids()
            .filter_map(|z| Some((map.value(z)?, map.class_of(z)?)))
            .collect();
        classed.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in classed.windows(2) {
            ensure(w[0].1 <= w[1].1, || {
                format!("case {case}: {:?} then {:?}", w[0], w[1])
            })?;
        }
        ensure(
            classed
                .iter()
                .all(|c| c.1 < k && c.1 == class_of(&breaks, c.0)),
            || format!("case {case}: class out of range"),
        )?;
        let nulls = values.values().filter(|v| v.is_none()).count();
        ensure(classed.len() + nulls == zones.len(), || {
            format!("case {case}: unclassed zones")
        })?;
    }
    Ok(format!(
        "{} rows, {} zips null for jobs, {} zero-POI zips, 500 monotone class sets",
        rows.len(),
        no_jobs.len(),
        no_pois.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "spatial join agrees with exhaustive scan",
            spatial_join_matches_scan,
        ),
        ("dedupe laws", dedupe_laws),
        ("weighted mean rating oracle", weighted_mean_oracle),
        ("reallocation conservation", reallocation_conserves),
        ("pearson correctness", pearson_correct),
        ("super-linear slope recovery", superlinear_slope),
        (
            "end-to-end determinism and goldens",
            end_to_end_deterministic,
        ),
        ("output contracts", output_contracts),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
