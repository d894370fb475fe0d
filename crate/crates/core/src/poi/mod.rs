//! Innovation points of interest: source clients, normalization and dedupe.
//!
//! Three sources feed the index. A keyword place search (the canonical one),
//! an OpenStreetMap-style tag query, and a job board. A fourth `registry`
//! source takes a pre-exported JSONL file and has no client.

mod cassette;
mod client;
mod dedupe;
#[cfg(feature = "live")]
mod http;
mod ratelimit;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;

pub use cassette::{CassetteStore, SourceRequest, Transport, TransportError};
pub use client::{
    job_fetch, keyword_fetch, tag_fetch, FetchMode, RetryPolicy, SourceClient, DEFAULT_JOB_QUERY,
};
pub use dedupe::{dedupe, dedupe_with_warnings, DedupeWarning, LOCATION_CONFLICT_M};
#[cfg(feature = "live")]
pub use http::{HttpEndpoints, HttpTransport};
pub use ratelimit::TokenBucket;

/// The twelve search terms used for the keyword source, in table order.
pub const DEFAULT_KEYWORDS: [&str; 12] = [
    "innovation hubs",
    "clustering",
    "innovation center",
    "startups",
    "innovation districts",
    "open innovation",
    "tech hub",
    "technology park",
    "incubator",
    "accelerators",
    "regional innovation",
    "co-working space",
];

/// Building-category tags queried on the tag source.
pub const DEFAULT_TAGS: [&str; 3] = ["company=startup", "office=coworking", "office=research"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    KeywordSearch,
    TagQuery,
    Registry,
    /// Job board postings. Not a POI source, but it shares the client and
    /// cassette machinery.
    Jobs,
}

impl Source {
    pub const ALL: [Source; 4] = [
        Source::KeywordSearch,
        Source::TagQuery,
        Source::Registry,
        Source::Jobs,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Source::KeywordSearch => "keyword_search",
            Source::TagQuery => "tag_query",
            Source::Registry => "registry",
            Source::Jobs => "jobs",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Source::ALL
            .into_iter()
            .find(|src| src.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown source `{s}`")))
    }
}

/// Ordered list of search terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KeywordSet(Vec<String>);

impl KeywordSet {
    pub fn new(terms: Vec<String>) -> Self {
        KeywordSet(terms)
    }

    pub fn terms(&self) -> &[String] {
        &self.0
    }
}

impl Default for KeywordSet {
    fn default() -> Self {
        KeywordSet(DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect())
    }
}

/// One innovation-relevant place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiRecord {
    pub source: Source,
    pub place_id: String,
    pub name: String,
    pub location: GeoPoint,
    pub rating: Option<f64>,
    pub rating_count: u64,
    pub matched_terms: BTreeSet<String>,
}

impl PoiRecord {
    /// Builds a record with the rating rules applied: a rating needs at least
    /// one rating behind it and must lie in [1, 5]; a count without a usable
    /// rating is dropped to zero.
    pub fn normalized(
        source: Source,
        place_id: impl Into<String>,
        name: impl Into<String>,
        location: GeoPoint,
        rating: Option<f64>,
        rating_count: u64,
        matched_terms: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let place_id = place_id.into();
        if place_id.is_empty() {
            return Err(Error::Data(format!("{source} record with empty place id")));
        }
        let (rating, rating_count) = match rating {
            _ if rating_count == 0 => (None, 0),
            Some(r) if r.is_finite() && (1.0..=5.0).contains(&r) => (Some(r), rating_count),
            other => {
                log::warn!(
                    "{source} {place_id}: unusable rating {other:?} with {rating_count} ratings; treated as unrated"
                );
                (None, 0)
            }
        };
        Ok(PoiRecord {
            source,
            place_id,
            name: name.into(),
            location,
            rating,
            rating_count,
            matched_terms: matched_terms.into_iter().collect(),
        })
    }
}

/// A job posting; only postings with a zip enter the per-zip counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobPosting {
    pub posting_id: String,
    pub title: String,
    pub zip_id: Option<String>,
    pub location: Option<GeoPoint>,
}

#[derive(Deserialize)]
struct RegistryLine {
    place_id: String,
    #[serde(default)]
    name: String,
    location: GeoPoint,
    #[serde(default)]
    rating: Option<f64>,
    #[serde(default)]
    rating_count: u64,
    #[serde(default)]
    matched_terms: BTreeSet<String>,
}

/// Reads a pre-exported start-up registry: one JSON object per line with
/// `place_id`, `location`, and optionally `name`, `rating`, `rating_count`,
/// `matched_terms`.
pub fn load_registry(path: &Path) -> Result<Vec<PoiRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let r: RegistryLine = serde_json::from_str(line)
                .map_err(|e| Error::Data(format!("{}:{}: {e}", path.display(), i + 1)))?;
            PoiRecord::normalized(
                Source::Registry,
                r.place_id,
                r.name,
                r.location,
                r.rating,
                r.rating_count,
                r.matched_terms,
            )
        })
        .collect()
}
