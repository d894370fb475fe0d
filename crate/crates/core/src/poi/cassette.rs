use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::Source;
use crate::error::{Error, Result};

/// A source request reduced to its identifying parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceRequest {
    pub source: Source,
    pub params: BTreeMap<String, String>,
}

impl SourceRequest {
    pub fn new<K: Into<String>, V: Into<String>>(
        source: Source,
        params: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        SourceRequest {
            source,
            params: params
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }

    /// `<source>\n` followed by one `key=value\n` line per parameter in key
    /// order. This is what the cassette key hashes.
    pub fn canonical(&self) -> String {
        let mut s = format!("{}\n", self.source);
        for (k, v) in &self.params {
            s.push_str(k);
            s.push('=');
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    pub fn key(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.get(name).map(String::as_str)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    /// Worth retrying: connection failures, throttling, 5xx.
    #[error("transient: {0}")]
    Transient(String),
    #[error("{0}")]
    Permanent(String),
}

/// Something that turns a request into a raw response body.
pub trait Transport: Send + Sync {
    fn fetch(&self, request: &SourceRequest) -> std::result::Result<Vec<u8>, TransportError>;
}

/// Raw response bodies on disk at `<root>/<source>/<request-sha256>.json`.
#[derive(Debug, Clone)]
pub struct CassetteStore {
    root: PathBuf,
}

impl CassetteStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CassetteStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, request: &SourceRequest) -> PathBuf {
        self.root
            .join(request.source.as_str())
            .join(format!("{}.json", request.key()))
    }

    pub fn replay(&self, request: &SourceRequest) -> Result<Vec<u8>> {
        let path = self.path_for(request);
        match std::fs::read(&path) {
            Ok(body) => Ok(body),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingCassette {
                origin: request.source,
                key: request.key(),
                path,
            }),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn record(&self, request: &SourceRequest, body: &[u8]) -> Result<()> {
        let path = self.path_for(request);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, body).map_err(|e| Error::io(path, e))
    }
}
