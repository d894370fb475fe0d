//! Per-zip innovation metrics and the zip-level feature matrix.
//!
//! The innovation index of a zip is the triple (number of innovation
//! locations, total number of ratings, ratings-weighted mean rating), computed
//! from the keyword-search source. The tag source and job postings are kept as
//! separate corroborating columns and never folded into those counts.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::ZoneSet;
use crate::poi::{JobPosting, PoiRecord};
use crate::tabular::{PermitTally, ZipSocioRow};

pub const UNASSIGNED: &str = "unassigned";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipInnovationMetrics {
    pub zip_id: String,
    pub location_count: u64,
    pub total_rating_count: u64,
    pub weighted_mean_rating: Option<f64>,
}

#[derive(Default)]
struct RatingAcc {
    locations: u64,
    ratings: u64,
    weighted_sum: f64,
    min: f64,
    max: f64,
}

impl RatingAcc {
    fn add(&mut self, poi: &PoiRecord) {
        self.locations += 1;
        if let (Some(r), n @ 1..) = (poi.rating, poi.rating_count) {
            if self.ratings == 0 {
                self.min = r;
                self.max = r;
            } else {
                self.min = self.min.min(r);
                self.max = self.max.max(r);
            }
            self.ratings += n;
            self.weighted_sum += r * n as f64;
        }
    }

    fn finish(self, zip_id: &str) -> ZipInnovationMetrics {
        ZipInnovationMetrics {
            zip_id: zip_id.to_string(),
            location_count: self.locations,
            total_rating_count: self.ratings,
            // the clamp only absorbs last-bit rounding; a weighted mean is
            // always within the range of its inputs
            weighted_mean_rating: (self.ratings > 0)
                .then(|| (self.weighted_sum / self.ratings as f64).clamp(self.min, self.max)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnovationMetrics {
    /// One row per zone, in zip order.
    pub by_zip: Vec<ZipInnovationMetrics>,
    /// POIs that fell in no zone.
    pub unassigned: ZipInnovationMetrics,
}

impl InnovationMetrics {
    pub fn assigned_locations(&self) -> u64 {
        self.by_zip.iter().map(|m| m.location_count).sum()
    }

    /// Location counts of the zips where this source found anything; the
    /// shape the partial-coverage columns of the feature matrix take.
    pub fn coverage_counts(&self) -> BTreeMap<String, u64> {
        self.by_zip
            .iter()
            .filter(|m| m.location_count > 0)
            .map(|m| (m.zip_id.clone(), m.location_count))
            .collect()
    }
}

/// Innovation metrics per zip for one source's deduplicated POIs.
pub fn zip_innovation_metrics(pois: &[PoiRecord], zones: &ZoneSet) -> InnovationMetrics {
    let mut acc: BTreeMap<&str, RatingAcc> =
        zones.zip_ids().map(|z| (z, RatingAcc::default())).collect();
    let mut unassigned = RatingAcc::default();
    for poi in pois {
        match zones.assign_zone(&poi.location) {
            Some(zip) => acc.get_mut(zip).expect("zone zip").add(poi),
            None => unassigned.add(poi),
        }
    }
    InnovationMetrics {
        by_zip: acc.into_iter().map(|(z, a)| a.finish(z)).collect(),
        unassigned: unassigned.finish(UNASSIGNED),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JobCounts {
    /// Zips with at least one posting.
    pub by_zip: BTreeMap<String, u64>,
    /// Postings whose zip is not in the zone set.
    pub unassigned: u64,
    /// Postings without a zip; excluded from every count.
    pub without_zip: u64,
}

pub fn job_zip_counts(postings: &[JobPosting], zones: &ZoneSet) -> JobCounts {
    let mut out = JobCounts::default();
    for p in postings {
        match p.zip_id.as_deref() {
            None => out.without_zip += 1,
            Some(z) if zones.contains_zip(z) => *out.by_zip.entry(z.to_string()).or_default() += 1,
            Some(_) => out.unassigned += 1,
        }
    }
    out
}

/// One row of the analysis matrix. Nullable fields are `None`, never a
/// sentinel number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipFeatureVector {
    pub zip_id: String,
    pub location_count: u64,
    pub total_rating_count: u64,
    pub weighted_mean_rating: Option<f64>,
    pub osm_location_count: Option<u64>,
    pub job_count: Option<u64>,
    pub permit_count: u64,
    pub permit_value_usd: f64,
    pub pop_total: u64,
    pub pct_white: Option<f64>,
    pub pct_black: Option<f64>,
    pub pct_hispanic: Option<f64>,
    pub vacancy_rate: Option<f64>,
    pub median_income_usd: Option<f64>,
    pub median_home_value_usd: Option<f64>,
    pub permit_value_per_business: Option<f64>,
}

/// Numeric feature columns in matrix order.
pub const FEATURE_COLUMNS: [&str; 15] = [
    "location_count",
    "total_rating_count",
    "weighted_mean_rating",
    "osm_location_count",
    "job_count",
    "permit_count",
    "permit_value_usd",
    "pop_total",
    "pct_white",
    "pct_black",
    "pct_hispanic",
    "vacancy_rate",
    "median_income_usd",
    "median_home_value_usd",
    "permit_value_per_business",
];

impl ZipFeatureVector {
    /// Value of a named feature column; `None` for an unknown name,
    /// `Some(None)` for a null cell.
    pub fn column(&self, name: &str) -> Option<Option<f64>> {
        let int = |v: u64| Some(v as f64);
        Some(match name {
            "location_count" => int(self.location_count),
            "total_rating_count" => int(self.total_rating_count),
            "weighted_mean_rating" => self.weighted_mean_rating,
            "osm_location_count" => self.osm_location_count.map(|v| v as f64),
            "job_count" => self.job_count.map(|v| v as f64),
            "permit_count" => int(self.permit_count),
            "permit_value_usd" => Some(self.permit_value_usd),
            "pop_total" => int(self.pop_total),
            "pct_white" => self.pct_white,
            "pct_black" => self.pct_black,
            "pct_hispanic" => self.pct_hispanic,
            "vacancy_rate" => self.vacancy_rate,
            "median_income_usd" => self.median_income_usd,
            "median_home_value_usd" => self.median_home_value_usd,
            "permit_value_per_business" => self.permit_value_per_business,
            _ => return None,
        })
    }
}

/// Permit value per innovation location ("x USD per business").
pub fn per_business_normalization(row: &ZipFeatureVector) -> Option<f64> {
    (row.location_count >= 1).then(|| row.permit_value_usd / row.location_count as f64)
}

/// Per-zip inputs to [`assemble_feature_matrix`], all keyed by zip id.
#[derive(Debug, Clone, Copy)]
pub struct FeatureInputs<'a> {
    pub keyword: &'a [ZipInnovationMetrics],
    /// Tag-source locations; a missing zip means no coverage.
    pub osm_counts: &'a BTreeMap<String, u64>,
    pub socio: &'a [ZipSocioRow],
    pub permits: &'a BTreeMap<String, PermitTally>,
    /// Job postings; a missing zip means no coverage.
    pub jobs: &'a BTreeMap<String, u64>,
}

fn check_zip<'z>(zones: &ZoneSet, context: &'static str, zip: &'z str) -> Result<&'z str> {
    if zones.contains_zip(zip) {
        Ok(zip)
    } else {
        Err(Error::UnknownZip {
            context,
            zip: zip.to_string(),
        })
    }
}

/// Outer join of every input over the zone set's zips, one row per zone in
/// zip order. Missing keyword or permit rows are true zeros; missing tag or
/// job rows are unknown coverage and stay null.
pub fn assemble_feature_matrix(
    inputs: FeatureInputs<'_>,
    zones: &ZoneSet,
) -> Result<Vec<ZipFeatureVector>> {
    let keyword: BTreeMap<&str, &ZipInnovationMetrics> = inputs
        .keyword
        .iter()
        .map(|m| Ok((check_zip(zones, "innovation metrics", &m.zip_id)?, m)))
        .collect::<Result<_>>()?;
    let socio: BTreeMap<&str, &ZipSocioRow> = inputs
        .socio
        .iter()
        .map(|s| Ok((check_zip(zones, "socio-economic rows", &s.zip_id)?, s)))
        .collect::<Result<_>>()?;
    for z in inputs.osm_counts.keys() {
        check_zip(zones, "tag-source counts", z)?;
    }
    for z in inputs.permits.keys() {
        check_zip(zones, "permit counts", z)?;
    }
    for z in inputs.jobs.keys() {
        check_zip(zones, "job counts", z)?;
    }

    Ok(zones
        .zip_ids()
        .map(|zip| {
            let m = keyword.get(zip);
            let s = socio.get(zip);
            let permits = inputs.permits.get(zip).copied().unwrap_or_default();
            let mut row = ZipFeatureVector {
                zip_id: zip.to_string(),
                location_count: m.map_or(0, |m| m.location_count),
                total_rating_count: m.map_or(0, |m| m.total_rating_count),
                weighted_mean_rating: m.and_then(|m| m.weighted_mean_rating),
                osm_location_count: inputs.osm_counts.get(zip).copied(),
                job_count: inputs.jobs.get(zip).copied(),
                permit_count: permits.permit_count,
                permit_value_usd: permits.permit_value_usd,
                pop_total: s.map_or(0, |s| s.pop_total),
                pct_white: s.and_then(|s| s.pct_white),
                pct_black: s.and_then(|s| s.pct_black),
                pct_hispanic: s.and_then(|s| s.pct_hispanic),
                vacancy_rate: s.and_then(|s| s.vacancy_rate),
                median_income_usd: s.and_then(|s| s.median_income_usd),
                median_home_value_usd: s.and_then(|s| s.median_home_value_usd),
                permit_value_per_business: None,
            };
            row.permit_value_per_business = per_business_normalization(&row);
            row
        })
        .collect())
}

/// CSV with a fixed header and empty cells for nulls.
pub fn write_features_csv<W: Write>(writer: W, rows: &[ZipFeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<features csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::test_util::*;
    use crate::geo::GeoPoint;
    use crate::poi::Source;
    use proptest::prelude::*;

    fn zones() -> ZoneSet {
        ZoneSet::new(vec![
            rect_zone("02108", 0.0, 0.0, 1.0, 1.0),
            rect_zone("02109", 1.0, 0.0, 2.0, 1.0),
            rect_zone("02110", 2.0, 0.0, 3.0, 1.0),
        ])
        .unwrap()
    }

    fn poi(id: &str, lon: f64, rating: Option<f64>, count: u64) -> PoiRecord {
        PoiRecord::normalized(
            Source::KeywordSearch,
            id,
            id,
            GeoPoint::new(lon, 0.5).unwrap(),
            rating,
            count,
            [],
        )
        .unwrap()
    }

    #[test]
    fn ratings_weighted_by_count() {
        // (4*10 + 5*30) / 40 = 4.75
        let m = zip_innovation_metrics(
            &[poi("a", 0.5, Some(4.0), 10), poi("b", 0.6, Some(5.0), 30)],
            &zones(),
        );
        let z = &m.by_zip[0];
        assert_eq!((z.location_count, z.total_rating_count), (2, 40));
        assert_eq!(z.weighted_mean_rating, Some(4.75));
    }

    #[test]
    fn empty_zip_is_zero_zero_null() {
        let m = zip_innovation_metrics(&[poi("a", 0.5, Some(4.0), 10)], &zones());
        assert_eq!(m.by_zip.len(), 3);
        let z = &m.by_zip[1];
        assert_eq!(
            (
                z.location_count,
                z.total_rating_count,
                z.weighted_mean_rating
            ),
            (0, 0, None)
        );
    }

    #[test]
    fn unrated_poi_counts_as_location_only() {
        let m = zip_innovation_metrics(&[poi("a", 1.5, Some(4.0), 0)], &zones());
        let z = &m.by_zip[1];
        assert_eq!(
            (
                z.location_count,
                z.total_rating_count,
                z.weighted_mean_rating
            ),
            (1, 0, None)
        );
    }

    #[test]
    fn conservation_with_unassigned() {
        let pois = [
            poi("a", 0.5, None, 0),
            poi("b", 9.0, Some(3.0), 2),
            poi("c", 2.5, None, 0),
        ];
        let m = zip_innovation_metrics(&pois, &zones());
        assert_eq!(m.assigned_locations() + m.unassigned.location_count, 3);
        assert_eq!(m.unassigned.zip_id, UNASSIGNED);
    }

    #[test]
    fn per_business() {
        let mut row = assemble_feature_matrix(
            FeatureInputs {
                keyword: &[],
                osm_counts: &BTreeMap::new(),
                socio: &[],
                permits: &BTreeMap::new(),
                jobs: &BTreeMap::new(),
            },
            &zones(),
        )
        .unwrap()
        .remove(0);
        assert_eq!(per_business_normalization(&row), None);
        row.location_count = 4;
        row.permit_value_usd = 1_000_000.0;
        assert_eq!(per_business_normalization(&row), Some(250_000.0));
        row.location_count = 3;
        row.permit_value_usd = 0.0;
        assert_eq!(per_business_normalization(&row), Some(0.0));
    }

    #[test]
    fn zero_versus_null_semantics() {
        let zs = zones();
        let m = zip_innovation_metrics(&[poi("a", 0.5, Some(4.0), 10)], &zs);
        let jobs = BTreeMap::from([("02108".to_string(), 3)]);
        let rows = assemble_feature_matrix(
            FeatureInputs {
                keyword: &m.by_zip,
                osm_counts: &m.coverage_counts(),
                socio: &[],
                permits: &BTreeMap::new(),
                jobs: &jobs,
            },
            &zs,
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].job_count, Some(3));
        assert_eq!(rows[1].job_count, None);
        assert_eq!(rows[1].location_count, 0);
        assert_eq!(rows[1].osm_location_count, None);
        assert_eq!(rows[1].permit_count, 0);
        assert_eq!(rows[0].permit_value_per_business, Some(0.0));
    }

    #[test]
    fn foreign_zip_is_rejected_by_name() {
        let jobs = BTreeMap::from([("02139".to_string(), 1)]);
        let err = assemble_feature_matrix(
            FeatureInputs {
                keyword: &[],
                osm_counts: &BTreeMap::new(),
                socio: &[],
                permits: &BTreeMap::new(),
                jobs: &jobs,
            },
            &zones(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("02139"));
    }

    #[test]
    fn job_counts_split_by_zip_status() {
        let jp = |id: &str, zip: Option<&str>| JobPosting {
            posting_id: id.into(),
            title: String::new(),
            zip_id: zip.map(String::from),
            location: None,
        };
        let c = job_zip_counts(
            &[
                jp("1", Some("02108")),
                jp("2", None),
                jp("3", Some("02139")),
                jp("4", Some("02108")),
            ],
            &zones(),
        );
        assert_eq!(c.by_zip["02108"], 2);
        assert_eq!((c.unassigned, c.without_zip), (1, 1));
    }

    #[test]
    fn csv_uses_empty_cells_for_null() {
        let rows = assemble_feature_matrix(
            FeatureInputs {
                keyword: &[],
                osm_counts: &BTreeMap::new(),
                socio: &[],
                permits: &BTreeMap::new(),
                jobs: &BTreeMap::new(),
            },
            &zones(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_features_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap().split(',').count(), 16);
        assert_eq!(lines.next().unwrap(), "02108,0,0,,,,0,0.0,0,,,,,,,");
    }

    #[test]
    fn column_lookup_covers_all_features() {
        let row = ZipFeatureVector {
            zip_id: "02108".into(),
            location_count: 1,
            total_rating_count: 2,
            weighted_mean_rating: None,
            osm_location_count: Some(3),
            job_count: None,
            permit_count: 4,
            permit_value_usd: 5.0,
            pop_total: 6,
            pct_white: None,
            pct_black: None,
            pct_hispanic: None,
            vacancy_rate: None,
            median_income_usd: None,
            median_home_value_usd: None,
            permit_value_per_business: None,
        };
        for c in FEATURE_COLUMNS {
            assert!(row.column(c).is_some(), "{c}");
        }
        assert_eq!(row.column("osm_location_count"), Some(Some(3.0)));
        assert_eq!(row.column("nope"), None);
    }

    proptest! {
        #[test]
        fn weighted_mean_is_convex_and_scale_invariant(
            items in proptest::collection::vec((1.0f64..=5.0, 0u64..500), 1..30)
        ) {
            let zs = zones();
            let pois: Vec<_> = items.iter().enumerate()
                .map(|(i, &(r, n))| poi(&format!("p{i}"), 0.5, Some(r), n)).collect();
            let m = zip_innovation_metrics(&pois, &zs).by_zip.remove(0);
            let doubled: Vec<_> = items.iter().enumerate()
                .map(|(i, &(r, n))| poi(&format!("p{i}"), 0.5, Some(r), 2 * n)).collect();
            let m2 = zip_innovation_metrics(&doubled, &zs).by_zip.remove(0);
            prop_assert_eq!(m.weighted_mean_rating, m2.weighted_mean_rating);
            let rated: Vec<f64> = items.iter().filter(|(_, n)| *n > 0).map(|(r, _)| *r).collect();
            match m.weighted_mean_rating {
                None => prop_assert!(rated.is_empty()),
                Some(mean) => {
                    let lo = rated.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = rated.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    prop_assert!(lo <= mean && mean <= hi);
                }
            }
        }
    }
}
