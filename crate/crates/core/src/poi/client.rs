use std::collections::BTreeMap;
use std::sync::LazyLock;
use std::time::Duration;

use regex::Regex;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::cassette::{CassetteStore, SourceRequest, Transport, TransportError};
use super::ratelimit::TokenBucket;
use super::{JobPosting, PoiRecord, Source};
use crate::error::{Error, Result};
use crate::geo::{BoundingBox, GeoPoint};

/// Search term for the job source.
pub const DEFAULT_JOB_QUERY: &str = "technology";

// Upper bound on followed page tokens; protects against a looping cursor.
const MAX_PAGES: usize = 50;

/// Exponential backoff for transient failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 5,
            base_delay: Duration::from_millis(500),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based): `base * 2^(retry-1)`.
    pub fn delay(&self, retry: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(retry.saturating_sub(1))
    }
}

pub enum FetchMode {
    Replay(CassetteStore),
    Live {
        transport: Box<dyn Transport>,
        /// Responses are written here so later runs can replay them.
        record_to: Option<CassetteStore>,
    },
}

/// One source's client: replays cassettes or talks to a live transport under
/// a rate limit with retries.
pub struct SourceClient {
    source: Source,
    mode: FetchMode,
    limiter: Option<TokenBucket>,
    retry: RetryPolicy,
}

impl SourceClient {
    pub fn replay(source: Source, store: CassetteStore) -> Self {
        SourceClient {
            source,
            mode: FetchMode::Replay(store),
            limiter: None,
            retry: RetryPolicy::default(),
        }
    }

    pub fn live(
        source: Source,
        transport: Box<dyn Transport>,
        record_to: Option<CassetteStore>,
        rate_limit_rps: Option<f64>,
    ) -> Self {
        SourceClient {
            source,
            mode: FetchMode::Live {
                transport,
                record_to,
            },
            limiter: rate_limit_rps.map(TokenBucket::new),
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Raw response body for `request`.
    pub fn get(&self, request: &SourceRequest) -> Result<Vec<u8>> {
        let (transport, record_to) = match &self.mode {
            FetchMode::Replay(store) => return store.replay(request),
            FetchMode::Live {
                transport,
                record_to,
            } => (transport, record_to),
        };

        let mut attempts = 0;
        loop {
            attempts += 1;
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            match transport.fetch(request) {
                Ok(body) => {
                    if let Some(store) = record_to {
                        store.record(request, &body)?;
                    }
                    return Ok(body);
                }
                Err(TransportError::Transient(msg)) if attempts <= self.retry.max_retries => {
                    let wait = self.retry.delay(attempts);
                    log::warn!(
                        "{} request failed ({msg}); retrying in {wait:?}",
                        self.source
                    );
                    std::thread::sleep(wait);
                }
                Err(e) => {
                    return Err(Error::Source {
                        origin: self.source,
                        attempts,
                        message: e.to_string(),
                    })
                }
            }
        }
    }

    fn expect(&self, source: Source) -> Result<()> {
        if self.source != source {
            return Err(Error::Precondition(format!(
                "{} client used for a {source} fetch",
                self.source
            )));
        }
        Ok(())
    }

    fn parse<T: DeserializeOwned>(&self, body: &[u8]) -> Result<T> {
        serde_json::from_slice(body).map_err(|e| Error::Response {
            origin: self.source,
            message: e.to_string(),
        })
    }

    /// Follows `next_page_token` cursors starting from `params`.
    fn pages<T: DeserializeOwned + Paged>(
        &self,
        params: BTreeMap<String, String>,
    ) -> Result<Vec<T>> {
        let mut out = Vec::new();
        let mut token: Option<String> = None;
        for _ in 0..MAX_PAGES {
            let mut p = params.clone();
            if let Some(t) = token.take() {
                p.insert("pagetoken".into(), t);
            }
            let page: T = self.parse(&self.get(&SourceRequest::new(self.source, p))?)?;
            token = page.next_token();
            out.push(page);
            if token.is_none() {
                return Ok(out);
            }
        }
        Err(Error::Response {
            origin: self.source,
            message: format!("more than {MAX_PAGES} pages"),
        })
    }
}

trait Paged {
    fn next_token(&self) -> Option<String>;
}

#[derive(Deserialize)]
struct PlacesPage {
    #[serde(default)]
    status: Option<String>,
    #[serde(default)]
    results: Vec<PlaceResult>,
    #[serde(default)]
    next_page_token: Option<String>,
}

impl Paged for PlacesPage {
    fn next_token(&self) -> Option<String> {
        self.next_page_token.clone()
    }
}

#[derive(Deserialize)]
struct PlaceResult {
    place_id: String,
    #[serde(default)]
    name: String,
    geometry: PlaceGeometry,
    #[serde(default)]
    rating: Option<f64>,
    #[serde(default)]
    user_ratings_total: Option<u64>,
}

#[derive(Deserialize)]
struct PlaceGeometry {
    location: LatLng,
}

#[derive(Deserialize)]
struct LatLng {
    lat: f64,
    lng: f64,
}

/// All places the keyword search returns for `term` within `region`, tagged
/// with `term`. Duplicates across pages or terms are left for
/// [`dedupe`](super::dedupe).
pub fn keyword_fetch(
    client: &SourceClient,
    term: &str,
    region: &BoundingBox,
) -> Result<Vec<PoiRecord>> {
    client.expect(Source::KeywordSearch)?;
    let params = BTreeMap::from([
        ("query".to_string(), term.to_string()),
        ("region".to_string(), region.to_param()),
    ]);
    let mut out = Vec::new();
    for page in client.pages::<PlacesPage>(params)? {
        match page.status.as_deref() {
            None | Some("OK") | Some("ZERO_RESULTS") => {}
            Some(other) => {
                return Err(Error::Response {
                    origin: Source::KeywordSearch,
                    message: format!("status {other} for `{term}`"),
                })
            }
        }
        for r in page.results {
            let Ok(location) = GeoPoint::new(r.geometry.location.lng, r.geometry.location.lat)
            else {
                log::warn!(
                    "keyword_search {}: invalid coordinates, skipped",
                    r.place_id
                );
                continue;
            };
            out.push(PoiRecord::normalized(
                Source::KeywordSearch,
                r.place_id,
                r.name,
                location,
                r.rating,
                r.user_ratings_total.unwrap_or(0),
                [term.to_string()],
            )?);
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct OverpassResponse {
    #[serde(default)]
    elements: Vec<OsmElement>,
}

#[derive(Deserialize)]
struct OsmElement {
    #[serde(rename = "type")]
    kind: String,
    id: u64,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
    #[serde(default)]
    center: Option<OsmCenter>,
    #[serde(default)]
    tags: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct OsmCenter {
    lat: f64,
    lon: f64,
}

/// Places carrying any of `tags` (`key=value`). One request per tag; tag
/// sources have no ratings.
pub fn tag_fetch(
    client: &SourceClient,
    tags: &[String],
    region: &BoundingBox,
) -> Result<Vec<PoiRecord>> {
    client.expect(Source::TagQuery)?;
    if tags.is_empty() {
        return Err(Error::Precondition(
            "tag query needs at least one tag".into(),
        ));
    }
    if let Some(bad) = tags.iter().find(|t| {
        t.split_once('=')
            .is_none_or(|(k, v)| k.is_empty() || v.is_empty())
    }) {
        return Err(Error::Precondition(format!("tag `{bad}` is not key=value")));
    }

    let mut out = Vec::new();
    for tag in tags {
        let req = SourceRequest::new(
            Source::TagQuery,
            [("region", region.to_param()), ("tag", tag.clone())],
        );
        let resp: OverpassResponse = client.parse(&client.get(&req)?)?;
        for el in resp.elements {
            let coords = match (el.lat, el.lon, &el.center) {
                (Some(lat), Some(lon), _) => Some((lon, lat)),
                (_, _, Some(c)) => Some((c.lon, c.lat)),
                _ => None,
            };
            let id = format!("{}/{}", el.kind, el.id);
            let Some(location) = coords.and_then(|(lon, lat)| GeoPoint::new(lon, lat).ok()) else {
                log::warn!("tag_query {id}: no usable coordinates, skipped");
                continue;
            };
            let name = el.tags.get("name").cloned().unwrap_or_default();
            out.push(PoiRecord::normalized(
                Source::TagQuery,
                id,
                name,
                location,
                None,
                0,
                [tag.clone()],
            )?);
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct JobsPage {
    #[serde(default)]
    results: Vec<JobResult>,
    #[serde(default)]
    next_page_token: Option<String>,
}

impl Paged for JobsPage {
    fn next_token(&self) -> Option<String> {
        self.next_page_token.clone()
    }
}

#[derive(Deserialize)]
struct JobResult {
    jobkey: String,
    #[serde(default)]
    jobtitle: String,
    #[serde(default, rename = "formattedLocation")]
    formatted_location: Option<String>,
    #[serde(default)]
    latitude: Option<f64>,
    #[serde(default)]
    longitude: Option<f64>,
}

static ZIP_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(\d{5})(?:-\d{4})?\b").expect("valid regex"));

/// Last 5-digit zip (optionally ZIP+4) in a free-text location.
pub(crate) fn extract_zip(location: &str) -> Option<String> {
    ZIP_RE
        .captures_iter(location)
        .last()
        .map(|c| c[1].to_string())
}

/// All postings for `query` within `region`. Postings whose location carries
/// no zip keep `zip_id = None`; nothing is geocoded.
pub fn job_fetch(
    client: &SourceClient,
    query: &str,
    region: &BoundingBox,
) -> Result<Vec<JobPosting>> {
    client.expect(Source::Jobs)?;
    let params = BTreeMap::from([
        ("query".to_string(), query.to_string()),
        ("region".to_string(), region.to_param()),
    ]);
    let mut out = Vec::new();
    for page in client.pages::<JobsPage>(params)? {
        for j in page.results {
            let location = match (j.longitude, j.latitude) {
                (Some(lon), Some(lat)) => GeoPoint::new(lon, lat).ok(),
                _ => None,
            };
            out.push(JobPosting {
                posting_id: j.jobkey,
                title: j.jobtitle,
                zip_id: j.formatted_location.as_deref().and_then(extract_zip),
                location,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};
    use std::sync::Arc;

    fn region() -> BoundingBox {
        BoundingBox::new(-71.2, 42.2, -71.0, 42.4).unwrap()
    }

    struct Flaky {
        failures: u32,
        calls: Arc<AtomicU32>,
        body: &'static str,
    }

    impl Transport for Flaky {
        fn fetch(&self, _: &SourceRequest) -> std::result::Result<Vec<u8>, TransportError> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                Err(TransportError::Transient("503".into()))
            } else {
                Ok(self.body.as_bytes().to_vec())
            }
        }
    }

    fn flaky_client(
        failures: u32,
        body: &'static str,
        store: Option<CassetteStore>,
    ) -> (SourceClient, Arc<AtomicU32>) {
        let calls = Arc::new(AtomicU32::new(0));
        let t = Flaky {
            failures,
            calls: calls.clone(),
            body,
        };
        let client = SourceClient::live(Source::KeywordSearch, Box::new(t), store, None)
            .with_retry(RetryPolicy {
                max_retries: 5,
                base_delay: Duration::ZERO,
            });
        (client, calls)
    }

    const ONE_PLACE: &str = r#"{"status":"OK","results":[
        {"place_id":"P1","name":"Lab","geometry":{"location":{"lat":42.35,"lng":-71.06}},"rating":4.5,"user_ratings_total":8}]}"#;

    #[test]
    fn backoff_doubles() {
        let p = RetryPolicy::default();
        assert_eq!(p.delay(1), Duration::from_millis(500));
        assert_eq!(p.delay(2), Duration::from_millis(1000));
        assert_eq!(p.delay(5), Duration::from_millis(8000));
    }

    #[test]
    fn retries_transient_failures_then_succeeds_and_records() {
        let dir = tempfile::tempdir().unwrap();
        let store = CassetteStore::new(dir.path());
        let (client, calls) = flaky_client(5, ONE_PLACE, Some(store.clone()));
        let recs = keyword_fetch(&client, "incubator", &region()).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 6);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].rating_count, 8);

        // the recorded cassette replays to the same records
        let replay = SourceClient::replay(Source::KeywordSearch, store);
        assert_eq!(
            keyword_fetch(&replay, "incubator", &region()).unwrap(),
            recs
        );
    }

    #[test]
    fn gives_up_after_five_retries() {
        let (client, calls) = flaky_client(6, ONE_PLACE, None);
        let err = keyword_fetch(&client, "incubator", &region()).unwrap_err();
        assert!(matches!(err, Error::Source { attempts: 6, .. }), "{err}");
        assert_eq!(err.exit_code(), 4);
        assert_eq!(calls.load(Ordering::SeqCst), 6);
    }

    #[test]
    fn missing_cassette_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let client = SourceClient::replay(Source::KeywordSearch, CassetteStore::new(dir.path()));
        let err = keyword_fetch(&client, "incubator", &region()).unwrap_err();
        assert!(matches!(err, Error::MissingCassette { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn follows_page_tokens() {
        let dir = tempfile::tempdir().unwrap();
        let store = CassetteStore::new(dir.path());
        let first = SourceRequest::new(
            Source::KeywordSearch,
            [
                ("query", "startups".to_string()),
                ("region", region().to_param()),
            ],
        );
        let mut second = first.clone();
        second.params.insert("pagetoken".into(), "t2".into());
        store
            .record(
                &first,
                ONE_PLACE
                    .replace("\"OK\"", "\"OK\",\"next_page_token\":\"t2\"")
                    .as_bytes(),
            )
            .unwrap();
        store
            .record(&second, ONE_PLACE.replace("P1", "P2").as_bytes())
            .unwrap();
        let client = SourceClient::replay(Source::KeywordSearch, store);
        let ids: Vec<_> = keyword_fetch(&client, "startups", &region())
            .unwrap()
            .into_iter()
            .map(|r| r.place_id)
            .collect();
        assert_eq!(ids, ["P1", "P2"]);
    }

    #[test]
    fn error_status_is_a_source_error() {
        let (client, _) = flaky_client(0, r#"{"status":"REQUEST_DENIED","results":[]}"#, None);
        let err = keyword_fetch(&client, "incubator", &region()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn wrong_client_for_source() {
        let (client, _) = flaky_client(0, ONE_PLACE, None);
        assert!(matches!(
            tag_fetch(&client, &["office=coworking".into()], &region()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tag_preconditions() {
        let dir = tempfile::tempdir().unwrap();
        let client = SourceClient::replay(Source::TagQuery, CassetteStore::new(dir.path()));
        assert!(matches!(
            tag_fetch(&client, &[], &region()),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            tag_fetch(&client, &["office".into()], &region()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zip_extraction() {
        assert_eq!(extract_zip("Boston, MA 02110").as_deref(), Some("02110"));
        assert_eq!(
            extract_zip("1 Main St, Boston, MA 02114-2621").as_deref(),
            Some("02114")
        );
        assert_eq!(extract_zip("Boston, MA"), None);
        assert_eq!(extract_zip("Remote"), None);
        // street numbers are not zips when a real zip follows
        assert_eq!(
            extract_zip("12345 Long Rd, Boston, MA 02118").as_deref(),
            Some("02118")
        );
        assert_eq!(extract_zip("Suite 1234567"), None);
    }
}
