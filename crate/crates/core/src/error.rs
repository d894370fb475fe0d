use std::path::PathBuf;

use crate::poi::Source;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between reading inputs and writing artifacts.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("zone {zone}: invalid geometry: {reason}")]
    InvalidGeometry { zone: String, reason: String },

    #[error("invalid coordinate (lon {lon}, lat {lat})")]
    InvalidPoint { lon: f64, lat: f64 },

    #[error("duplicate zip id {0} in zone set")]
    DuplicateZone(String),

    #[error("{context}: zip {zip} is not part of the zone set")]
    UnknownZip { context: &'static str, zip: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid record: {0}")]
    Data(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no cassette for {origin} request {key} (expected {})", path.display())]
    MissingCassette {
        origin: Source,
        key: String,
        path: PathBuf,
    },

    #[error("{origin} source failed after {attempts} attempt(s): {message}")]
    Source {
        origin: Source,
        attempts: u32,
        message: String,
    },

    #[error("{origin} response could not be parsed: {message}")]
    Response { origin: Source, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("stage `{stage}` needs {missing}; run `innodex {needs}` first")]
    StageDependency {
        stage: &'static str,
        needs: &'static str,
        missing: String,
    },

    #[error("artifact {artifact} changed since it was recorded in the manifest (recorded {recorded}, found {found}); rerun the producing stage")]
    StaleArtifact {
        artifact: String,
        recorded: String,
        found: String,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit code: 2 config, 3 data, 4 source.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::MissingCassette { .. } => 2,
            Error::Source { .. } | Error::Response { .. } => 4,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
