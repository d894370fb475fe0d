use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::geojson::DEFAULT_ZIP_PROPERTY;
use crate::metrics::FEATURE_COLUMNS;
use crate::poi::{Source, DEFAULT_JOB_QUERY, DEFAULT_KEYWORDS, DEFAULT_TAGS};
use crate::render::{Palette, DEFAULT_CLASSES};
use crate::tabular::{CensusColumns, DEFAULT_SAMPLES_PER_TRACT};

/// Overrides the configured cassette directory.
pub const CASSETTE_DIR_ENV: &str = "INNODEX_CASSETTE_DIR";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceMode {
    #[default]
    Replay,
    Live,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSettings {
    #[serde(default)]
    pub mode: SourceMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_limit_rps: Option<f64>,
    /// Live endpoint; the built-in default is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    /// Name of the environment variable holding the API key.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    /// In live mode, also write responses to the cassette directory.
    #[serde(default)]
    pub record: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcesConfig {
    #[serde(default)]
    pub keyword_search: SourceSettings,
    #[serde(default)]
    pub tag_query: SourceSettings,
    #[serde(default)]
    pub jobs: SourceSettings,
}

impl SourcesConfig {
    pub fn get(&self, source: Source) -> Option<&SourceSettings> {
        match source {
            Source::KeywordSearch => Some(&self.keyword_search),
            Source::TagQuery => Some(&self.tag_query),
            Source::Jobs => Some(&self.jobs),
            Source::Registry => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusSection {
    #[serde(default)]
    pub columns: CensusColumns,
}

fn default_zone_property() -> String {
    DEFAULT_ZIP_PROPERTY.to_string()
}
fn default_tract_property() -> String {
    "GEOID".to_string()
}
fn default_cassette_dir() -> PathBuf {
    PathBuf::from("cassettes")
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES_PER_TRACT
}
fn default_classes() -> usize {
    DEFAULT_CLASSES
}
fn default_keywords() -> Vec<String> {
    DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect()
}
fn default_tags() -> Vec<String> {
    DEFAULT_TAGS.iter().map(|s| s.to_string()).collect()
}
fn default_job_query() -> String {
    DEFAULT_JOB_QUERY.to_string()
}
fn default_render_variables() -> Vec<String> {
    [
        "location_count",
        "permit_count",
        "vacancy_rate",
        "pct_white",
    ]
    .map(String::from)
    .to_vec()
}
fn default_correlation_columns() -> Vec<String> {
    FEATURE_COLUMNS.iter().map(|s| s.to_string()).collect()
}

/// Pipeline configuration as read from TOML. Relative paths are resolved
/// against the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub zones_path: PathBuf,
    #[serde(default = "default_zone_property")]
    pub zone_id_property: String,
    pub tracts_path: PathBuf,
    #[serde(default = "default_tract_property")]
    pub tract_id_property: String,
    pub census_path: PathBuf,
    pub permits_path: PathBuf,
    /// Pre-exported start-up registry (JSONL).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry_path: Option<PathBuf>,
    /// Precomputed tract-to-zip crosswalk; sampled from geometry when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosswalk_path: Option<PathBuf>,
    #[serde(default = "default_cassette_dir")]
    pub cassette_dir: PathBuf,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub random_seed: u64,
    #[serde(default = "default_samples")]
    pub samples_per_tract: usize,
    #[serde(default = "default_classes")]
    pub k_classes: usize,
    #[serde(default)]
    pub palette: Palette,
    /// Circle overlay on the maps, sized by value.
    #[serde(default)]
    pub circles: bool,
    #[serde(default = "default_keywords")]
    pub keywords: Vec<String>,
    #[serde(default = "default_tags")]
    pub tags: Vec<String>,
    #[serde(default = "default_job_query")]
    pub job_query: String,
    #[serde(default = "default_render_variables")]
    pub render_variables: Vec<String>,
    #[serde(default = "default_correlation_columns")]
    pub correlation_columns: Vec<String>,
    #[serde(default)]
    pub sources: SourcesConfig,
    #[serde(default)]
    pub census: CensusSection,

    #[serde(skip)]
    base_dir: PathBuf,
}

/// Command-line values that take precedence over the file and environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub cassette_dir: Option<PathBuf>,
    pub random_seed: Option<u64>,
}

impl PipelineConfig {
    /// Parses TOML text; relative paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    /// Reads a config file and applies [`CASSETTE_DIR_ENV`] and `overrides`.
    /// Override paths are taken relative to the working directory.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg = Self::from_toml(&text, base)?;
        let cwd = std::env::current_dir().map_err(|e| Error::io(".", e))?;
        if let Some(dir) = std::env::var_os(CASSETTE_DIR_ENV).filter(|v| !v.is_empty()) {
            cfg.cassette_dir = cwd.join(dir);
        }
        if let Some(dir) = &overrides.cassette_dir {
            cfg.cassette_dir = cwd.join(dir);
        }
        if let Some(dir) = &overrides.output_dir {
            cfg.output_dir = cwd.join(dir);
        }
        if let Some(seed) = overrides.random_seed {
            cfg.random_seed = seed;
        }
        Ok(cfg)
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn cassette_dir(&self) -> PathBuf {
        self.resolve(&self.cassette_dir)
    }

    pub fn with_output_dir(mut self, dir: PathBuf) -> Self {
        self.output_dir = dir;
        self
    }

    /// Named input files, optional ones included only when configured.
    pub fn input_files(&self) -> Vec<(&'static str, PathBuf)> {
        let mut files = vec![
            ("zones", self.resolve(&self.zones_path)),
            ("tracts", self.resolve(&self.tracts_path)),
            ("census", self.resolve(&self.census_path)),
            ("permits", self.resolve(&self.permits_path)),
        ];
        if let Some(p) = &self.registry_path {
            files.push(("registry", self.resolve(p)));
        }
        if let Some(p) = &self.crosswalk_path {
            files.push(("crosswalk", self.resolve(p)));
        }
        files
    }

    /// Checks everything that can be checked without touching a source.
    pub fn validate(&self) -> Result<()> {
        for (name, path) in self.input_files() {
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "{name} file {} does not exist",
                    path.display()
                )));
            }
        }
        let replays = [Source::KeywordSearch, Source::TagQuery, Source::Jobs]
            .iter()
            .any(|s| {
                self.sources
                    .get(*s)
                    .is_some_and(|c| c.mode == SourceMode::Replay)
            });
        if replays && !self.cassette_dir().is_dir() {
            return Err(Error::Config(format!(
                "cassette directory {} does not exist",
                self.cassette_dir().display()
            )));
        }
        for s in [Source::KeywordSearch, Source::TagQuery, Source::Jobs] {
            let settings = self.sources.get(s).expect("client source");
            if settings.mode == SourceMode::Live && !cfg!(feature = "live") {
                return Err(Error::Config(format!(
                    "source {s} is set to live mode but this build has no live support (enable the `live` feature)"
                )));
            }
            if let Some(rps) = settings.rate_limit_rps {
                if !(rps.is_finite() && rps > 0.0) {
                    return Err(Error::Config(format!(
                        "sources.{s}.rate_limit_rps must be positive"
                    )));
                }
            }
        }
        if self.keywords.is_empty() || self.keywords.iter().any(|k| k.trim().is_empty()) {
            return Err(Error::Config(
                "keywords must be a non-empty list of non-empty terms".into(),
            ));
        }
        if self.tags.is_empty() {
            return Err(Error::Config("tags must not be empty".into()));
        }
        if let Some(bad) = self.tags.iter().find(|t| {
            t.split_once('=')
                .is_none_or(|(k, v)| k.is_empty() || v.is_empty())
        }) {
            return Err(Error::Config(format!("tag `{bad}` is not key=value")));
        }
        if self.samples_per_tract == 0 {
            return Err(Error::Config("samples_per_tract must be positive".into()));
        }
        if self.k_classes < 2 {
            return Err(Error::Config("k_classes must be at least 2".into()));
        }
        for (what, list) in [
            ("render_variables", &self.render_variables),
            ("correlation_columns", &self.correlation_columns),
        ] {
            if let Some(bad) = list.iter().find(|c| !FEATURE_COLUMNS.contains(&c.as_str())) {
                return Err(Error::Config(format!(
                    "{what}: unknown feature `{bad}` (known: {})",
                    FEATURE_COLUMNS.join(", ")
                )));
            }
        }
        if self.correlation_columns.is_empty() {
            return Err(Error::Config(
                "correlation_columns must not be empty".into(),
            ));
        }
        Ok(())
    }

    /// The configuration with every default filled in, as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
