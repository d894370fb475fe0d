//! Live HTTP transport, enabled with the `live` feature.

use super::cassette::{SourceRequest, Transport, TransportError};
use super::Source;

#[derive(Debug, Clone)]
pub struct HttpEndpoints {
    /// Text-search endpoint returning `results` / `next_page_token` JSON.
    pub keyword_url: String,
    /// Overpass interpreter endpoint.
    pub overpass_url: String,
    pub jobs_url: String,
    pub api_key: Option<String>,
}

impl Default for HttpEndpoints {
    fn default() -> Self {
        HttpEndpoints {
            keyword_url: "https://maps.googleapis.com/maps/api/place/textsearch/json".into(),
            overpass_url: "https://overpass-api.de/api/interpreter".into(),
            jobs_url: String::new(),
            api_key: None,
        }
    }
}

pub struct HttpTransport {
    agent: ureq::Agent,
    endpoints: HttpEndpoints,
}

impl HttpTransport {
    pub fn new(endpoints: HttpEndpoints) -> Self {
        HttpTransport {
            agent: ureq::Agent::new_with_defaults(),
            endpoints,
        }
    }

    fn overpass_query(request: &SourceRequest) -> Result<String, TransportError> {
        let tag = request
            .param("tag")
            .ok_or_else(|| TransportError::Permanent("tag request without tag".into()))?;
        let (key, value) = tag
            .split_once('=')
            .ok_or_else(|| TransportError::Permanent(format!("bad tag {tag}")))?;
        let region = request.param("region").unwrap_or_default();
        let b: Vec<&str> = region.split(',').collect();
        let [w, s, e, n] = b[..] else {
            return Err(TransportError::Permanent(format!("bad region {region}")));
        };
        Ok(format!(
            "[out:json][timeout:90];nwr[\"{key}\"=\"{value}\"]({s},{w},{n},{e});out center;"
        ))
    }
}

fn classify(err: ureq::Error) -> TransportError {
    match err {
        ureq::Error::StatusCode(code) if code == 429 || code >= 500 => {
            TransportError::Transient(format!("HTTP {code}"))
        }
        ureq::Error::StatusCode(code) => TransportError::Permanent(format!("HTTP {code}")),
        other => TransportError::Transient(other.to_string()),
    }
}

impl Transport for HttpTransport {
    fn fetch(&self, request: &SourceRequest) -> Result<Vec<u8>, TransportError> {
        let response = match request.source {
            Source::TagQuery => {
                let query = Self::overpass_query(request)?;
                self.agent
                    .post(&self.endpoints.overpass_url)
                    .send_form([("data", query.as_str())])
            }
            Source::KeywordSearch | Source::Jobs => {
                let url = if request.source == Source::Jobs {
                    &self.endpoints.jobs_url
                } else {
                    &self.endpoints.keyword_url
                };
                if url.is_empty() {
                    return Err(TransportError::Permanent(format!(
                        "no endpoint configured for {}",
                        request.source
                    )));
                }
                let mut req = self.agent.get(url);
                for (k, v) in &request.params {
                    req = req.query(k, v);
                }
                if let Some(key) = &self.endpoints.api_key {
                    req = req.query("key", key);
                }
                req.call()
            }
            Source::Registry => {
                return Err(TransportError::Permanent("registry has no client".into()))
            }
        };
        response
            .map_err(classify)?
            .body_mut()
            .read_to_vec()
            .map_err(classify)
    }
}
