use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::census::TractGeometry;
use crate::error::{Error, Result};
use crate::geo::{GeoPoint, ZoneSet};

pub const DEFAULT_SAMPLES_PER_TRACT: usize = 2000;
/// Entries lighter than this are dropped before renormalizing.
pub const MIN_CROSSWALK_WEIGHT: f64 = 1e-3;

// Rejection sampling gives up after this many draws per accepted sample.
const MAX_DRAWS_PER_SAMPLE: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosswalkEntry {
    pub tract_id: String,
    pub zip_id: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosswalkOptions {
    pub samples_per_tract: usize,
    pub seed: u64,
}

impl Default for CrosswalkOptions {
    fn default() -> Self {
        CrosswalkOptions {
            samples_per_tract: DEFAULT_SAMPLES_PER_TRACT,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Crosswalk {
    /// Ordered by (tract_id, zip_id).
    pub entries: Vec<CrosswalkEntry>,
    /// Tracts where no sample landed in any zone.
    pub unassigned: Vec<String>,
    /// Tracts with some samples outside every zone. Their weights sum to the
    /// inside fraction rather than 1.
    pub partially_outside: Vec<String>,
}

impl Crosswalk {
    pub fn weight_sum(&self, tract_id: &str) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.tract_id == tract_id)
            .map(|e| e.weight)
            .sum()
    }
}

/// Per-tract RNG seed: the first 8 bytes of sha256(seed_le || tract_id), so a
/// tract's samples do not depend on its position in the input.
fn tract_seed(seed: u64, tract_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(tract_id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Area-weighted tract→zip crosswalk by Monte Carlo sampling.
///
/// Each tract draws `samples_per_tract` points uniformly inside its polygon
/// (jittered over a grid on its bounding box) and classifies them with [`ZoneSet::assign_zone`]. The weight of a zip is
/// its share of the samples. Entries below [`MIN_CROSSWALK_WEIGHT`] are
/// dropped and the survivors rescaled to the tract's inside fraction
/// (1 for tracts fully covered by zones).
pub fn build_crosswalk(
    tracts: &[TractGeometry],
    zones: &ZoneSet,
    opts: &CrosswalkOptions,
) -> Result<Crosswalk> {
    if opts.samples_per_tract == 0 {
        return Err(Error::Precondition(
            "samples_per_tract must be positive".into(),
        ));
    }
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = tracts.iter().find(|t| !seen.insert(t.tract_id.as_str())) {
        return Err(Error::Data(format!("duplicate tract id {}", dup.tract_id)));
    }

    let n = opts.samples_per_tract;
    let mut out = Crosswalk::default();
    let mut ordered: Vec<&TractGeometry> = tracts.iter().collect();
    ordered.sort_by(|a, b| a.tract_id.cmp(&b.tract_id));

    for tract in ordered {
        let mut rng = ChaCha8Rng::seed_from_u64(tract_seed(opts.seed, &tract.tract_id));
        let bb = tract.bbox();
        let mut hits: BTreeMap<&str, usize> = BTreeMap::new();
        let mut outside = 0usize;
        let mut accepted = 0usize;
        let mut draws = 0usize;
        // jittered strata over the bbox, visited in a fresh random order each pass
        let side = (n as f64).sqrt().ceil() as usize;
        let mut cells: Vec<usize> = (0..side * side).collect();
        let mut cursor = cells.len();
        let (w, h) = (bb.max_lon - bb.min_lon, bb.max_lat - bb.min_lat);
        while accepted < n {
            draws += 1;
            if draws > n * MAX_DRAWS_PER_SAMPLE {
                return Err(Error::InvalidGeometry {
                    zone: tract.tract_id.clone(),
                    reason: "could not sample points inside tract (zero area?)".into(),
                });
            }
            if cursor == cells.len() {
                cells.shuffle(&mut rng);
                cursor = 0;
            }
            let cell = cells[cursor];
            cursor += 1;
            let (col, row) = ((cell % side) as f64, (cell / side) as f64);
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let p = GeoPoint::new(
                (bb.min_lon + (col + u) / side as f64 * w).min(bb.max_lon),
                (bb.min_lat + (row + v) / side as f64 * h).min(bb.max_lat),
            )?;
            if !tract.contains(&p) {
                continue;
            }
            accepted += 1;
            match zones.assign_zone(&p) {
                Some(zip) => *hits.entry(zip).or_default() += 1,
                None => outside += 1,
            }
        }

        let inside_fraction = (n - outside) as f64 / n as f64;
        let kept: Vec<(&str, f64)> = hits
            .into_iter()
            .map(|(zip, c)| (zip, c as f64 / n as f64))
            .filter(|&(_, w)| w >= MIN_CROSSWALK_WEIGHT)
            .collect();
        let kept_sum: f64 = kept.iter().map(|(_, w)| w).sum();
        if kept.is_empty() {
            log::warn!("tract {} lies outside every zone", tract.tract_id);
            out.unassigned.push(tract.tract_id.clone());
            continue;
        }
        if outside > 0 {
            out.partially_outside.push(tract.tract_id.clone());
        }
        for (zip, w) in kept {
            out.entries.push(CrosswalkEntry {
                tract_id: tract.tract_id.clone(),
                zip_id: zip.to_string(),
                weight: if outside == 0 {
                    w / kept_sum
                } else {
                    w / kept_sum * inside_fraction
                },
            });
        }
    }
    Ok(out)
}

pub fn write_crosswalk_csv<W: Write>(writer: W, entries: &[CrosswalkEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for e in entries {
        w.serialize(e)?;
    }
    w.flush().map_err(|e| Error::io("<crosswalk csv>", e))?;
    Ok(())
}

const WEIGHT_SLACK: f64 = 1e-9;

pub fn read_crosswalk_csv<R: Read>(reader: R) -> Result<Vec<CrosswalkEntry>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut entries = Vec::new();
    for row in rdr.deserialize() {
        let mut e: CrosswalkEntry = row?;
        // exported weights often carry rounding a few ulps past the bounds
        if !(-WEIGHT_SLACK..=1.0 + WEIGHT_SLACK).contains(&e.weight) {
            return Err(Error::Data(format!(
                "crosswalk {}→{}: weight {} outside [0, 1]",
                e.tract_id, e.zip_id, e.weight
            )));
        }
        e.weight = e.weight.clamp(0.0, 1.0);
        entries.push(e);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::test_util::*;

    fn tract(id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> TractGeometry {
        TractGeometry::new(id, vec![vec![rect(x0, y0, x1, y1)]]).unwrap()
    }

    fn halves() -> ZoneSet {
        ZoneSet::new(vec![
            rect_zone("02109", -71.06, 42.35, -71.05, 42.36),
            rect_zone("02110", -71.05, 42.35, -71.04, 42.36),
        ])
        .unwrap()
    }

    fn opts() -> CrosswalkOptions {
        CrosswalkOptions {
            samples_per_tract: 2000,
            seed: 7,
        }
    }

    #[test]
    fn tract_inside_one_zip() {
        let xw = build_crosswalk(
            &[tract("T1", -71.058, 42.352, -71.052, 42.358)],
            &halves(),
            &opts(),
        )
        .unwrap();
        assert_eq!(xw.entries.len(), 1);
        assert_eq!(xw.entries[0].zip_id, "02109");
        assert_eq!(xw.entries[0].weight, 1.0);
    }

    #[test]
    fn bisected_square_splits_evenly() {
        // exact intersection areas: each zip covers half of the tract
        let t = tract("T1", -71.055, 42.352, -71.045, 42.358);
        let xw = build_crosswalk(&[t], &halves(), &opts()).unwrap();
        assert_eq!(xw.entries.len(), 2);
        for e in &xw.entries {
            assert!((e.weight - 0.5).abs() <= 0.03, "{e:?}");
        }
        assert!((xw.weight_sum("T1") - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tract_outside_all_zips_is_flagged() {
        let xw = build_crosswalk(
            &[tract("T9", -70.0, 42.0, -69.99, 42.01)],
            &halves(),
            &opts(),
        )
        .unwrap();
        assert!(xw.entries.is_empty());
        assert_eq!(xw.unassigned, ["T9"]);
    }

    #[test]
    fn partially_outside_keeps_inside_fraction() {
        // left half of the tract hangs off the zone set
        let t = tract("T2", -71.07, 42.352, -71.05, 42.358);
        let xw = build_crosswalk(&[t], &halves(), &opts()).unwrap();
        assert_eq!(xw.partially_outside, ["T2"]);
        let s = xw.weight_sum("T2");
        assert!((s - 0.5).abs() < 0.03, "{s}");
    }

    #[test]
    fn tiny_slivers_are_dropped_and_weights_renormalized() {
        // 0.02% of the tract lies in 02110
        let t = tract("T3", -71.06, 42.35, -71.04999, 42.36);
        let xw = build_crosswalk(
            &[t],
            &halves(),
            &CrosswalkOptions {
                samples_per_tract: 5000,
                seed: 1,
            },
        )
        .unwrap();
        assert!(xw.entries.iter().all(|e| e.weight >= MIN_CROSSWALK_WEIGHT));
        assert!((xw.weight_sum("T3") - 1.0).abs() < 1e-9);
    }

    #[test]
    fn same_seed_same_bits() {
        let ts = [
            tract("T1", -71.055, 42.352, -71.045, 42.358),
            tract("T2", -71.059, 42.351, -71.041, 42.353),
        ];
        let a = build_crosswalk(&ts, &halves(), &opts()).unwrap();
        let rev: Vec<_> = ts.iter().rev().cloned().collect();
        let b = build_crosswalk(&rev, &halves(), &opts()).unwrap();
        assert_eq!(a, b);
        let c = build_crosswalk(&ts, &halves(), &CrosswalkOptions { seed: 8, ..opts() }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let xw = build_crosswalk(
            &[tract("T1", -71.055, 42.352, -71.045, 42.358)],
            &halves(),
            &opts(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_crosswalk_csv(&mut buf, &xw.entries).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("tract_id,zip_id,weight\n"));
        assert_eq!(read_crosswalk_csv(buf.as_slice()).unwrap(), xw.entries);
    }

    #[test]
    fn csv_weights_within_rounding_are_clamped() {
        let text = "tract_id,zip_id,weight\nT1,02108,1.000000000007\nT2,02108,-1e-13\n";
        let e = read_crosswalk_csv(text.as_bytes()).unwrap();
        assert_eq!((e[0].weight, e[1].weight), (1.0, 0.0));
        assert!(read_crosswalk_csv("tract_id,zip_id,weight\nT1,02108,1.01\n".as_bytes()).is_err());
    }

    #[test]
    fn duplicate_tracts_rejected() {
        let t = tract("T1", -71.055, 42.352, -71.045, 42.358);
        assert!(build_crosswalk(&[t.clone(), t], &halves(), &opts()).is_err());
    }
}
