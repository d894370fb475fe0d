use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use super::config::{PipelineConfig, SourceMode};
use super::manifest::{file_sha256, sha256_hex, ArtifactRecord, Manifest, StageRecord};
use super::report::{summary_report, LogLogReport};
use crate::error::{Error, Result};
use crate::geo::{geojson::load_zones, BoundingBox, ZoneSet};
use crate::metrics::{
    assemble_feature_matrix, job_zip_counts, write_features_csv, zip_innovation_metrics,
    FeatureInputs, ZipFeatureVector,
};
use crate::poi::{
    dedupe_with_warnings, job_fetch, keyword_fetch, load_registry, tag_fetch, CassetteStore,
    JobPosting, PoiRecord, Source, SourceClient,
};
use crate::render::{render_choropleth, render_corr_heatmap, DivergingPalette, MapOptions};
use crate::stats::{correlation_matrix, loglog_slope, CorrelationMatrix};
use crate::tabular::{
    build_crosswalk, filter_permits, load_tract_geometries, permit_zip_counts, read_census_csv,
    read_crosswalk_csv, read_permits_csv, tract_to_zip, write_crosswalk_csv, Crosswalk,
    CrosswalkOptions,
};

pub const JOBS_FILE: &str = "jobs.jsonl";
pub const FEATURES_CSV: &str = "features.csv";
pub const FEATURES_JSONL: &str = "features.jsonl";
pub const CROSSWALK_FILE: &str = "crosswalk.csv";
pub const CORRELATION_CSV: &str = "correlation.csv";
pub const CORRELATION_JSON: &str = "correlation.json";
pub const CORRELATION_SVG: &str = "correlation.svg";
pub const LOGLOG_FILE: &str = "loglog.json";
pub const REPORT_FILE: &str = "report.txt";

/// Normalized output file of a POI source.
pub fn poi_file(source: Source) -> String {
    format!("pois.{}.jsonl", source.as_str())
}

pub fn choropleth_files(variable: &str) -> (String, String) {
    (
        format!("{variable}.choropleth.geojson"),
        format!("{variable}.map.svg"),
    )
}

/// The scaling diagnostic relates these two columns.
const LOGLOG_X: &str = "location_count";
const LOGLOG_Y: &str = "total_rating_count";

fn to_jsonl<T: Serialize>(items: &[T]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.push(b'\n');
    }
    Ok(out)
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::Data(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn pretty_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

enum Fetched {
    Pois {
        source: Source,
        records: Vec<PoiRecord>,
        raw: u64,
        conflicts: u64,
    },
    Jobs {
        postings: Vec<JobPosting>,
        raw: u64,
    },
}

/// Runs pipeline stages against one output directory. Each stage reads the
/// artifacts of the stage before it, checks them against the manifest, and
/// records its own outputs.
pub struct Pipeline {
    cfg: PipelineConfig,
    out: PathBuf,
}

impl Pipeline {
    /// Validates the configuration; nothing is read or fetched on failure.
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let out = cfg.output_dir();
        Ok(Pipeline { cfg, out })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn output_dir(&self) -> &Path {
        &self.out
    }

    fn manifest(&self) -> Result<Manifest> {
        std::fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        let mut m = Manifest::load_or_default(&self.out)?;
        m.version = env!("CARGO_PKG_VERSION").to_string();
        m.seed = self.cfg.random_seed;
        m.parameters = json!({
            "zone_id_property": self.cfg.zone_id_property,
            "tract_id_property": self.cfg.tract_id_property,
            "census_columns": self.cfg.census.columns,
            "keywords": self.cfg.keywords,
            "tags": self.cfg.tags,
            "job_query": self.cfg.job_query,
            "samples_per_tract": self.cfg.samples_per_tract,
            "crosswalk": if self.cfg.crosswalk_path.is_some() { "precomputed" } else { "sampled" },
            "k_classes": self.cfg.k_classes,
            "palette": self.cfg.palette,
            "circles": self.cfg.circles,
            "render_variables": self.cfg.render_variables,
            "correlation_columns": self.cfg.correlation_columns,
        });
        Ok(m)
    }

    fn write(&self, record: &mut StageRecord, name: &str, bytes: &[u8], rows: u64) -> Result<()> {
        let path = self.out.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        record.outputs.insert(
            name.to_string(),
            ArtifactRecord {
                sha256: sha256_hex(bytes),
                rows,
            },
        );
        Ok(())
    }

    fn input(
        &self,
        manifest: &mut Manifest,
        record: &mut StageRecord,
        name: &str,
        path: &Path,
    ) -> Result<()> {
        let hash = file_sha256(path)?;
        manifest.inputs.insert(name.to_string(), hash.clone());
        record.consumed.insert(format!("input:{name}"), hash);
        Ok(())
    }

    fn load_zones(&self, manifest: &mut Manifest, record: &mut StageRecord) -> Result<ZoneSet> {
        let path = self.cfg.resolve(&self.cfg.zones_path);
        self.input(manifest, record, "zones", &path)?;
        load_zones(&path, &self.cfg.zone_id_property)
    }

    fn consume(
        &self,
        manifest: &Manifest,
        record: &mut StageRecord,
        stage: &'static str,
        producer: &'static str,
        artifact: &str,
    ) -> Result<PathBuf> {
        let hash = manifest.require(stage, producer, artifact, &self.out)?;
        record.consumed.insert(artifact.to_string(), hash);
        Ok(self.out.join(artifact))
    }

    /// Sources fetched by a full `fetch`: the three clients, plus the
    /// registry when one is configured.
    pub fn fetch_sources(&self) -> Vec<Source> {
        let mut s = vec![Source::KeywordSearch, Source::TagQuery, Source::Jobs];
        if self.cfg.registry_path.is_some() {
            s.push(Source::Registry);
        }
        s.sort();
        s
    }

    fn client(&self, source: Source) -> Result<SourceClient> {
        let settings = self.cfg.sources.get(source).expect("client source");
        match settings.mode {
            SourceMode::Replay => Ok(SourceClient::replay(
                source,
                CassetteStore::new(self.cfg.cassette_dir()),
            )),
            SourceMode::Live => self.live_client(source),
        }
    }

    #[cfg(feature = "live")]
    fn live_client(&self, source: Source) -> Result<SourceClient> {
        use crate::poi::{HttpEndpoints, HttpTransport};
        let settings = self.cfg.sources.get(source).expect("client source");
        let mut endpoints = HttpEndpoints::default();
        if let Some(url) = &settings.url {
            match source {
                Source::KeywordSearch => endpoints.keyword_url = url.clone(),
                Source::TagQuery => endpoints.overpass_url = url.clone(),
                Source::Jobs => endpoints.jobs_url = url.clone(),
                Source::Registry => {}
            }
        }
        endpoints.api_key = settings
            .api_key_env
            .as_ref()
            .and_then(|v| std::env::var(v).ok());
        let record = settings
            .record
            .then(|| CassetteStore::new(self.cfg.cassette_dir()));
        Ok(SourceClient::live(
            source,
            Box::new(HttpTransport::new(endpoints)),
            record,
            settings.rate_limit_rps,
        ))
    }

    #[cfg(not(feature = "live"))]
    fn live_client(&self, source: Source) -> Result<SourceClient> {
        Err(Error::Config(format!(
            "source {source} needs the `live` feature"
        )))
    }

    fn fetch_one(&self, source: Source, region: &BoundingBox) -> Result<Fetched> {
        let pois = |raw: Vec<PoiRecord>| {
            let n = raw.len() as u64;
            let (records, warnings) = dedupe_with_warnings(raw);
            Fetched::Pois {
                source,
                records,
                raw: n,
                conflicts: warnings.len() as u64,
            }
        };
        Ok(match source {
            Source::KeywordSearch => {
                let client = self.client(source)?;
                let mut raw = Vec::new();
                for term in &self.cfg.keywords {
                    raw.extend(keyword_fetch(&client, term, region)?);
                }
                pois(raw)
            }
            Source::TagQuery => pois(tag_fetch(&self.client(source)?, &self.cfg.tags, region)?),
            Source::Registry => {
                let path = self
                    .cfg
                    .registry_path
                    .as_ref()
                    .ok_or_else(|| Error::Config("no registry_path configured".into()))?;
                pois(load_registry(&self.cfg.resolve(path))?)
            }
            Source::Jobs => {
                let raw = job_fetch(&self.client(source)?, &self.cfg.job_query, region)?;
                let n = raw.len() as u64;
                let mut by_id: BTreeMap<String, JobPosting> = BTreeMap::new();
                for p in raw {
                    by_id.entry(p.posting_id.clone()).or_insert(p);
                }
                Fetched::Jobs {
                    postings: by_id.into_values().collect(),
                    raw: n,
                }
            }
        })
    }

    /// Pulls every source (or just `only`) over the zone set's bounding box,
    /// dedupes, and writes normalized JSONL. Sources run concurrently; their
    /// results are written in a fixed order.
    pub fn fetch(&self, only: Option<Source>) -> Result<StageRecord> {
        self.fetch_inner(only).map_err(|e| e.in_stage("fetch"))
    }

    fn fetch_inner(&self, only: Option<Source>) -> Result<StageRecord> {
        let mut manifest = self.manifest()?;
        let mut record = match only {
            Some(_) => manifest.stages.get("fetch").cloned().unwrap_or_default(),
            None => StageRecord::default(),
        };
        let zones = self.load_zones(&mut manifest, &mut record)?;
        let region = zones.bbox();
        let sources = match only {
            Some(s) => vec![s],
            None => self.fetch_sources(),
        };
        if let Some(path) = self
            .cfg
            .registry_path
            .as_ref()
            .filter(|_| sources.contains(&Source::Registry))
        {
            self.input(
                &mut manifest,
                &mut record,
                "registry",
                &self.cfg.resolve(path),
            )?;
        }

        let results: Vec<Result<Fetched>> = std::thread::scope(|scope| {
            let handles: Vec<_> = sources
                .iter()
                .map(|&s| scope.spawn(move || self.fetch_one(s, &region)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("fetch worker panicked"))
                .collect()
        });

        for fetched in results {
            match fetched? {
                Fetched::Pois {
                    source,
                    records,
                    raw,
                    conflicts,
                } => {
                    let s = source.as_str();
                    record.counts.insert(format!("{s}.raw"), raw);
                    record
                        .counts
                        .insert(format!("{s}.records"), records.len() as u64);
                    record
                        .counts
                        .insert(format!("{s}.location_conflicts"), conflicts);
                    self.write(
                        &mut record,
                        &poi_file(source),
                        &to_jsonl(&records)?,
                        records.len() as u64,
                    )?;
                }
                Fetched::Jobs { postings, raw } => {
                    let without = postings.iter().filter(|p| p.zip_id.is_none()).count() as u64;
                    record.counts.insert("jobs.raw".into(), raw);
                    record
                        .counts
                        .insert("jobs.records".into(), postings.len() as u64);
                    record.counts.insert("jobs.without_zip".into(), without);
                    self.write(
                        &mut record,
                        JOBS_FILE,
                        &to_jsonl(&postings)?,
                        postings.len() as u64,
                    )?;
                }
            }
        }
        manifest.record_stage("fetch", record.clone());
        manifest.save(&self.out)?;
        Ok(record)
    }

    /// Spatial join, crosswalk and reallocation, permits and jobs, and the
    /// per-zip feature matrix.
    pub fn aggregate(&self) -> Result<StageRecord> {
        self.aggregate_inner().map_err(|e| e.in_stage("aggregate"))
    }

    fn aggregate_inner(&self) -> Result<StageRecord> {
        const STAGE: &str = "aggregate";
        let mut manifest = self.manifest()?;
        let mut record = StageRecord::default();
        let mut pois: BTreeMap<Source, Vec<PoiRecord>> = BTreeMap::new();
        for source in self.fetch_sources() {
            if source == Source::Jobs {
                continue;
            }
            let path = self.consume(&manifest, &mut record, STAGE, "fetch", &poi_file(source))?;
            pois.insert(source, read_jsonl(&path)?);
        }
        let jobs_path = self.consume(&manifest, &mut record, STAGE, "fetch", JOBS_FILE)?;
        let postings: Vec<JobPosting> = read_jsonl(&jobs_path)?;

        let zones = self.load_zones(&mut manifest, &mut record)?;
        let c = &mut record.counts;
        c.insert("zones".into(), zones.len() as u64);

        let mut metrics = BTreeMap::new();
        for (source, records) in &pois {
            let m = zip_innovation_metrics(records, &zones);
            let s = source.as_str();
            record
                .counts
                .insert(format!("{s}.assigned"), m.assigned_locations());
            record
                .counts
                .insert(format!("{s}.unassigned"), m.unassigned.location_count);
            metrics.insert(*source, m);
        }

        // census tracts to zips
        let census_path = self.cfg.resolve(&self.cfg.census_path);
        self.input(&mut manifest, &mut record, "census", &census_path)?;
        let tracts = read_census_csv(open(&census_path)?, &self.cfg.census.columns)?;
        let crosswalk = match &self.cfg.crosswalk_path {
            Some(p) => {
                let path = self.cfg.resolve(p);
                self.input(&mut manifest, &mut record, "crosswalk", &path)?;
                Crosswalk {
                    entries: read_crosswalk_csv(open(&path)?)?,
                    ..Crosswalk::default()
                }
            }
            None => {
                let path = self.cfg.resolve(&self.cfg.tracts_path);
                self.input(&mut manifest, &mut record, "tracts", &path)?;
                let geoms = load_tract_geometries(&path, &self.cfg.tract_id_property)?;
                record
                    .counts
                    .insert("tract_geometries".into(), geoms.len() as u64);
                build_crosswalk(
                    &geoms,
                    &zones,
                    &CrosswalkOptions {
                        samples_per_tract: self.cfg.samples_per_tract,
                        seed: self.cfg.random_seed,
                    },
                )?
            }
        };
        let socio = tract_to_zip(&tracts, &crosswalk.entries)?;
        let c = &mut record.counts;
        c.insert("census.tracts".into(), tracts.len() as u64);
        c.insert(
            "census.pop_total".into(),
            tracts.iter().map(|t| t.pop_total).sum(),
        );
        c.insert("crosswalk.entries".into(), crosswalk.entries.len() as u64);
        c.insert(
            "crosswalk.unassigned_tracts".into(),
            crosswalk.unassigned.len() as u64,
        );
        c.insert(
            "crosswalk.partially_outside_tracts".into(),
            crosswalk.partially_outside.len() as u64,
        );
        c.insert("socio.zips".into(), socio.len() as u64);

        // permits
        let permits_path = self.cfg.resolve(&self.cfg.permits_path);
        self.input(&mut manifest, &mut record, "permits", &permits_path)?;
        let permits = read_permits_csv(open(&permits_path)?)?;
        let commercial = filter_permits(&permits);
        let tally = permit_zip_counts(&commercial, &zones);
        let c = &mut record.counts;
        c.insert("permits.records".into(), permits.len() as u64);
        c.insert("permits.commercial".into(), commercial.len() as u64);
        c.insert(
            "permits.assigned".into(),
            tally.by_zip.values().map(|t| t.permit_count).sum(),
        );
        c.insert("permits.unassigned".into(), tally.unassigned.permit_count);
        c.insert(
            "permits.null_values".into(),
            tally.by_zip.values().map(|t| t.null_values).sum::<u64>()
                + tally.unassigned.null_values,
        );

        let jobs = job_zip_counts(&postings, &zones);
        c.insert("jobs.assigned".into(), jobs.by_zip.values().sum());
        c.insert("jobs.unassigned".into(), jobs.unassigned);
        c.insert("jobs.without_zip".into(), jobs.without_zip);

        let osm = metrics
            .get(&Source::TagQuery)
            .map(|m| m.coverage_counts())
            .unwrap_or_default();
        let features = assemble_feature_matrix(
            FeatureInputs {
                keyword: metrics
                    .get(&Source::KeywordSearch)
                    .map_or(&[], |m| &m.by_zip[..]),
                osm_counts: &osm,
                socio: &socio,
                permits: &tally.by_zip,
                jobs: &jobs.by_zip,
            },
            &zones,
        )?;
        record
            .counts
            .insert("features.rows".into(), features.len() as u64);

        let mut xw = Vec::new();
        write_crosswalk_csv(&mut xw, &crosswalk.entries)?;
        self.write(
            &mut record,
            CROSSWALK_FILE,
            &xw,
            crosswalk.entries.len() as u64,
        )?;
        let mut csv = Vec::new();
        write_features_csv(&mut csv, &features)?;
        let rows = features.len() as u64;
        self.write(&mut record, FEATURES_CSV, &csv, rows)?;
        self.write(&mut record, FEATURES_JSONL, &to_jsonl(&features)?, rows)?;

        manifest.record_stage(STAGE, record.clone());
        manifest.save(&self.out)?;
        Ok(record)
    }

    /// Correlation matrix over the configured columns and the log-log
    /// scaling fit of ratings on locations.
    pub fn correlate(&self) -> Result<StageRecord> {
        self.correlate_inner().map_err(|e| e.in_stage("correlate"))
    }

    fn correlate_inner(&self) -> Result<StageRecord> {
        const STAGE: &str = "correlate";
        let mut manifest = self.manifest()?;
        let mut record = StageRecord::default();
        let path = self.consume(&manifest, &mut record, STAGE, "aggregate", FEATURES_JSONL)?;
        let rows: Vec<ZipFeatureVector> = read_jsonl(&path)?;

        let matrix = correlation_matrix(&rows, &self.cfg.correlation_columns)?;
        let k = matrix.len();
        let nulls = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| i < j && matrix.r[i][j].is_none())
            .count();
        record.counts.insert("columns".into(), k as u64);
        record.counts.insert("null_pairs".into(), nulls as u64);

        let series = |col: &str| -> Vec<f64> {
            rows.iter()
                .map(|r| r.column(col).flatten().unwrap_or(0.0))
                .collect()
        };
        let (fit, reason) = match loglog_slope(&series(LOGLOG_X), &series(LOGLOG_Y)) {
            Ok(fit) => (Some(fit), None),
            Err(Error::Precondition(why)) => (None, Some(why)),
            Err(e) => return Err(e),
        };
        record
            .counts
            .insert("loglog.pairs".into(), fit.map_or(0, |f| f.n as u64));
        let loglog = LogLogReport {
            x: LOGLOG_X.into(),
            y: LOGLOG_Y.into(),
            fit,
            reason,
        };

        let mut csv = Vec::new();
        matrix.write_csv(&mut csv)?;
        self.write(&mut record, CORRELATION_CSV, &csv, k as u64)?;
        self.write(
            &mut record,
            CORRELATION_JSON,
            &pretty_json(&matrix)?,
            k as u64,
        )?;
        self.write(&mut record, LOGLOG_FILE, &pretty_json(&loglog)?, 1)?;

        manifest.record_stage(STAGE, record.clone());
        manifest.save(&self.out)?;
        Ok(record)
    }

    /// Choropleths for the configured variables, the correlation heatmap,
    /// and the text report.
    pub fn render(&self) -> Result<StageRecord> {
        self.render_inner().map_err(|e| e.in_stage("render"))
    }

    fn render_inner(&self) -> Result<StageRecord> {
        const STAGE: &str = "render";
        let mut manifest = self.manifest()?;
        let mut record = StageRecord::default();
        let features = self.consume(&manifest, &mut record, STAGE, "aggregate", FEATURES_JSONL)?;
        let corr = self.consume(&manifest, &mut record, STAGE, "correlate", CORRELATION_JSON)?;
        let loglog = self.consume(&manifest, &mut record, STAGE, "correlate", LOGLOG_FILE)?;
        let rows: Vec<ZipFeatureVector> = read_jsonl(&features)?;
        let matrix: CorrelationMatrix =
            serde_json::from_slice(&std::fs::read(&corr).map_err(|e| Error::io(&corr, e))?)?;
        let loglog: LogLogReport =
            serde_json::from_slice(&std::fs::read(&loglog).map_err(|e| Error::io(&loglog, e))?)?;
        let zones = self.load_zones(&mut manifest, &mut record)?;

        let opts = MapOptions {
            classes: self.cfg.k_classes,
            palette: self.cfg.palette,
            circles: self.cfg.circles,
        };
        for var in &self.cfg.render_variables {
            let values: BTreeMap<String, Option<f64>> = rows
                .iter()
                .map(|r| {
                    let v = r
                        .column(var)
                        .ok_or_else(|| Error::Config(format!("unknown feature `{var}`")))?;
                    Ok((r.zip_id.clone(), v))
                })
                .collect::<Result<_>>()?;
            let map = render_choropleth(&zones, var, &values, &opts)?;
            let (geo, svg) = choropleth_files(var);
            let n = zones.len() as u64;
            self.write(&mut record, &geo, map.geojson.as_bytes(), n)?;
            self.write(&mut record, &svg, map.svg.as_bytes(), n)?;
            record.counts.insert(
                format!("{var}.null_zones"),
                values.values().filter(|v| v.is_none()).count() as u64,
            );
        }
        record
            .counts
            .insert("maps".into(), self.cfg.render_variables.len() as u64);

        let heat = render_corr_heatmap(&matrix, &DivergingPalette::default());
        self.write(
            &mut record,
            CORRELATION_SVG,
            heat.as_bytes(),
            matrix.len() as u64,
        )?;
        let report = summary_report(&rows, &loglog, self.cfg.random_seed);
        self.write(
            &mut record,
            REPORT_FILE,
            report.as_bytes(),
            report.lines().count() as u64,
        )?;

        manifest.record_stage(STAGE, record.clone());
        manifest.save(&self.out)?;
        Ok(record)
    }

    /// Every stage in order, built in a scratch directory next to the output
    /// directory and moved into place only if all of them succeed.
    pub fn run(&self) -> Result<Manifest> {
        let name = self
            .out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into());
        let parent = self.out.parent().map(Path::to_path_buf).unwrap_or_default();
        let staging = parent.join(format!(".{name}.partial"));
        if staging.exists() {
            std::fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
        }
        let scratch = Pipeline {
            cfg: self.cfg.clone(),
            out: staging.clone(),
        };
        let result = (|| {
            scratch.fetch(None)?;
            scratch.aggregate()?;
            scratch.correlate()?;
            scratch.render()?;
            Manifest::load_or_default(&staging)
        })();
        let manifest = match result {
            Ok(m) => m,
            Err(e) => {
                let _ = std::fs::remove_dir_all(&staging);
                return Err(e);
            }
        };

        std::fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        let mut files: Vec<PathBuf> = std::fs::read_dir(&staging)
            .map_err(|e| Error::io(&staging, e))?
            .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(&staging, err)))
            .collect::<Result<_>>()?;
        files.sort();
        for f in files {
            let dest = self.out.join(f.file_name().expect("file name"));
            std::fs::rename(&f, &dest).map_err(|e| Error::io(&dest, e))?;
        }
        std::fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
        Ok(manifest)
    }
}
