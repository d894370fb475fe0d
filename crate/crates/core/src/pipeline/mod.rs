//! Configuration, stage orchestration, manifests, and the run report.

mod config;
mod manifest;
mod report;
mod stages;

pub use config::{
    CensusSection, Overrides, PipelineConfig, SourceMode, SourceSettings, SourcesConfig,
    CASSETTE_DIR_ENV,
};
pub use manifest::{
    file_sha256, sha256_hex, ArtifactRecord, Manifest, StageRecord, MANIFEST_FILE, STAGES,
};
pub use report::{summary_report, top_zips, LogLogReport, TOP_N};
pub use stages::{
    choropleth_files, poi_file, Pipeline, CORRELATION_CSV, CORRELATION_JSON, CORRELATION_SVG,
    CROSSWALK_FILE, FEATURES_CSV, FEATURES_JSONL, JOBS_FILE, LOGLOG_FILE, REPORT_FILE,
};
