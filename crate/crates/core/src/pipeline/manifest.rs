use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Pipeline stages in execution order.
pub const STAGES: [&str; 4] = ["fetch", "aggregate", "correlate", "render"];

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub sha256: String,
    pub rows: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Hashes of the upstream artifacts this stage read.
    pub consumed: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, ArtifactRecord>,
    pub counts: BTreeMap<String, u64>,
}

/// Everything needed to reproduce a run: input hashes, the seed and
/// parameters, and per-stage outputs and row counts. No timestamps, so an
/// unchanged rerun writes the same bytes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub stages: BTreeMap<String, StageRecord>,
}

impl Manifest {
    /// Reads `<dir>/manifest.json`, or an empty manifest if there is none.
    pub fn load_or_default(dir: &Path) -> Result<Manifest> {
        let path = dir.join(MANIFEST_FILE);
        match std::fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Manifest::default()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(path, e))
    }

    /// Stores a stage's record and forgets every later stage, whose outputs
    /// were built from what this stage just replaced.
    pub fn record_stage(&mut self, stage: &str, record: StageRecord) {
        let pos = STAGES
            .iter()
            .position(|s| *s == stage)
            .expect("known stage");
        for later in &STAGES[pos + 1..] {
            self.stages.remove(*later);
        }
        self.stages.insert(stage.to_string(), record);
    }

    /// Confirms that `producer` recorded `artifact` and that the file in
    /// `dir` still has the recorded hash. Returns that hash.
    pub fn require(
        &self,
        stage: &'static str,
        producer: &'static str,
        artifact: &str,
        dir: &Path,
    ) -> Result<String> {
        let missing = || Error::StageDependency {
            stage,
            needs: producer,
            missing: artifact.to_string(),
        };
        let recorded = self
            .stages
            .get(producer)
            .and_then(|r| r.outputs.get(artifact))
            .ok_or_else(missing)?;
        let path = dir.join(artifact);
        if !path.is_file() {
            return Err(missing());
        }
        let found = file_sha256(&path)?;
        if found != recorded.sha256 {
            return Err(Error::StaleArtifact {
                artifact: artifact.to_string(),
                recorded: recorded.sha256.clone(),
                found,
            });
        }
        Ok(found)
    }

    /// Row counts of every stage flattened to `stage.count` keys.
    pub fn flat_counts(&self) -> BTreeMap<String, u64> {
        self.stages
            .iter()
            .flat_map(|(s, r)| r.counts.iter().map(move |(k, v)| (format!("{s}.{k}"), *v)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_output(name: &str, bytes: &[u8]) -> StageRecord {
        let mut r = StageRecord::default();
        r.outputs.insert(
            name.into(),
            ArtifactRecord {
                sha256: sha256_hex(bytes),
                rows: 1,
            },
        );
        r
    }

    #[test]
    fn require_checks_presence_and_hash() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::default();
        let err = m
            .require("correlate", "aggregate", "features.jsonl", dir.path())
            .unwrap_err();
        assert!(matches!(err, Error::StageDependency { .. }));
        assert_eq!(err.exit_code(), 3);

        m.record_stage("aggregate", with_output("features.jsonl", b"a\n"));
        assert!(matches!(
            m.require("correlate", "aggregate", "features.jsonl", dir.path()),
            Err(Error::StageDependency { .. })
        ));
        std::fs::write(dir.path().join("features.jsonl"), b"a\n").unwrap();
        m.require("correlate", "aggregate", "features.jsonl", dir.path())
            .unwrap();
        std::fs::write(dir.path().join("features.jsonl"), b"b\n").unwrap();
        assert!(matches!(
            m.require("correlate", "aggregate", "features.jsonl", dir.path()),
            Err(Error::StaleArtifact { .. })
        ));
    }

    #[test]
    fn rerunning_a_stage_drops_later_ones() {
        let mut m = Manifest::default();
        for s in STAGES {
            m.record_stage(s, StageRecord::default());
        }
        m.record_stage("aggregate", StageRecord::default());
        assert_eq!(m.stages.keys().collect::<Vec<_>>(), ["aggregate", "fetch"]);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest {
            version: "x".into(),
            seed: 9,
            ..Manifest::default()
        };
        m.record_stage("fetch", with_output("a", b"1"));
        m.stages
            .get_mut("fetch")
            .unwrap()
            .counts
            .insert("rows".into(), 4);
        m.save(dir.path()).unwrap();
        let back = Manifest::load_or_default(dir.path()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.flat_counts()["fetch.rows"], 4);
    }
}
