use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use innodex::pipeline::{Overrides, Pipeline, PipelineConfig, StageRecord};
use innodex::poi::Source;

#[derive(Parser)]
#[command(
    name = "innodex",
    version,
    about = "Zip-level innovation index pipeline"
)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(short, long, global = true, default_value = "innodex.toml")]
    config: PathBuf,
    /// Overrides `output_dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Overrides `cassette_dir` and INNODEX_CASSETTE_DIR.
    #[arg(long, global = true)]
    cassette_dir: Option<PathBuf>,
    /// Overrides `random_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch and dedupe POIs and job postings into normalized JSONL.
    Fetch {
        /// Fetch a single source (keyword_search, tag_query, registry, jobs).
        #[arg(long)]
        source: Option<Source>,
    },
    /// Spatial join, tract reallocation, permits, and the feature matrix.
    Aggregate,
    /// Correlation matrix and log-log scaling fit.
    Correlate,
    /// Choropleth maps, correlation heatmap, and report.
    Render,
    /// All stages in order.
    Run,
    /// Check the configuration and print it with defaults filled in.
    ValidateConfig,
}

fn summarize(stage: &str, record: &StageRecord) {
    for (name, artifact) in &record.outputs {
        println!("{stage}: {name} ({} rows)", artifact.rows);
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let overrides = Overrides {
        output_dir: cli.output_dir,
        cassette_dir: cli.cassette_dir,
        random_seed: cli.seed,
    };
    let result = PipelineConfig::load(&cli.config, &overrides).and_then(|cfg| {
        if let Command::ValidateConfig = cli.command {
            cfg.validate()?;
            print!("{}", cfg.to_toml());
            return Ok(());
        }
        let pipeline = Pipeline::new(cfg)?;
        match cli.command {
            Command::Fetch { source } => summarize("fetch", &pipeline.fetch(source)?),
            Command::Aggregate => summarize("aggregate", &pipeline.aggregate()?),
            Command::Correlate => summarize("correlate", &pipeline.correlate()?),
            Command::Render => summarize("render", &pipeline.render()?),
            Command::Run => {
                let manifest = pipeline.run()?;
                for (stage, record) in &manifest.stages {
                    summarize(stage, record);
                }
                println!("outputs in {}", pipeline.output_dir().display());
            }
            Command::ValidateConfig => unreachable!(),
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
