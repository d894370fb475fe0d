use std::collections::BTreeMap;

use super::{PoiRecord, Source};

/// Two sightings of one id further apart than this are reported.
pub const LOCATION_CONFLICT_M: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DedupeWarning {
    pub source: Source,
    pub place_id: String,
    pub distance_m: f64,
}

/// One record per `(source, place_id)`, ordered by that key.
///
/// Matched terms are unioned over all duplicates. The rating, rating count,
/// name and location come from the duplicate with the most ratings; the
/// first one seen wins ties.
pub fn dedupe(records: Vec<PoiRecord>) -> Vec<PoiRecord> {
    dedupe_with_warnings(records).0
}

pub fn dedupe_with_warnings(records: Vec<PoiRecord>) -> (Vec<PoiRecord>, Vec<DedupeWarning>) {
    let mut by_id: BTreeMap<(Source, String), PoiRecord> = BTreeMap::new();
    let mut warnings = Vec::new();

    for rec in records {
        let key = (rec.source, rec.place_id.clone());
        let Some(kept) = by_id.get_mut(&key) else {
            by_id.insert(key, rec);
            continue;
        };
        let distance_m = kept.location.distance_m(&rec.location);
        if distance_m > LOCATION_CONFLICT_M {
            log::warn!(
                "{} {}: duplicate sightings {distance_m:.0} m apart",
                rec.source,
                rec.place_id
            );
            warnings.push(DedupeWarning {
                source: rec.source,
                place_id: rec.place_id.clone(),
                distance_m,
            });
        }
        if rec.rating_count > kept.rating_count {
            let terms = std::mem::take(&mut kept.matched_terms);
            *kept = rec;
            kept.matched_terms.extend(terms);
        } else {
            kept.matched_terms.extend(rec.matched_terms);
        }
    }
    (by_id.into_values().collect(), warnings)
}
