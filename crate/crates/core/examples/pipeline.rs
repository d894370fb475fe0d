//! Runs every stage on the bundled fixture, then shows that a stage refuses
//! to run on a tampered upstream artifact.
//!
//!     cargo run --example pipeline -- [out_dir]

use std::path::{Path, PathBuf};

use innodex::pipeline::{Overrides, Pipeline, PipelineConfig, FEATURES_JSONL};

fn main() -> innodex::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("innodex_pipeline"));
    let overrides = Overrides {
        output_dir: Some(out.clone()),
        ..Overrides::default()
    };
    let cfg = PipelineConfig::load(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("innodex.toml"),
        &overrides,
    )?;
    let pipeline = Pipeline::new(cfg)?;

    let manifest = pipeline.run()?;
    for (stage, record) in &manifest.stages {
        println!("{stage}");
        for (name, count) in &record.counts {
            println!("  {name:<36} {count}");
        }
    }
    println!(
        "{}",
        std::fs::read_to_string(out.join("report.txt")).unwrap_or_default()
    );

    let features = out.join(FEATURES_JSONL);
    let mut text =
        std::fs::read_to_string(&features).map_err(|e| innodex::Error::io(&features, e))?;
    text.push('\n');
    std::fs::write(&features, text).map_err(|e| innodex::Error::io(&features, e))?;
    match pipeline.correlate() {
        Err(e) => println!(
            "after editing {FEATURES_JSONL}: {e} (exit code {})",
            e.exit_code()
        ),
        Ok(_) => println!("unexpected: correlate accepted a modified input"),
    }
    Ok(())
}
