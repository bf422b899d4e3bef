//! `ideadiv`: generate, categorize and analyze idea corpora.
//!
//! Exit codes: 0 success, 1 config error, 2 backend error, 3 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ideadiv::experiment::{self, BackendKind, ExperimentConfig, ExperimentError, Overrides};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ideadiv", version, about = "Idea-diversity experiment pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Live,
    Sim,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured backend.
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Overrides the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every planned session and write corpus.jsonl.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Keep complete sessions from an existing corpus.
        #[arg(long)]
        resume: bool,
    },
    /// Label a corpus and embed its ideas.
    Categorize {
        #[command(flatten)]
        common: Common,
        /// Corpus to label; defaults to <out>/corpus.jsonl.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Compute diversity, fixation and partitioning reports.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Labeled corpora to pool; defaults to <out>/labeled.jsonl.
        #[arg(long)]
        corpus: Vec<PathBuf>,
    },
    /// Repeat the whole pipeline once per temperature.
    SweepTemperature {
        #[command(flatten)]
        common: Common,
        /// Comma-separated temperatures; defaults to the config's list.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    cfg.apply(&Overrides {
        backend: common.backend.map(|b| match b {
            Backend::Live => BackendKind::Live,
            Backend::Sim => BackendKind::Sim,
        }),
        seed: common.seed,
        out: common.out.clone(),
    });
    Ok(cfg)
}

fn print<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializes"));
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Generate { common, resume } => {
            let report = experiment::cmd_generate(&load(&common)?, resume)?;
            print(&report);
        }
        Command::Categorize { common, corpus } => {
            let report = experiment::cmd_categorize(&load(&common)?, corpus.as_deref())?;
            print(&report);
        }
        Command::Analyze { common, corpus } => {
            let report = experiment::cmd_analyze(&load(&common)?, &corpus)?;
            print(&report.full_sample);
        }
        Command::SweepTemperature { common, values } => {
            let cfg = load(&common)?;
            let values = values.unwrap_or_else(|| cfg.sweep_temperatures.clone());
            print(&experiment::cmd_sweep_temperature(&cfg, &values)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // usage errors count as config errors; --help and --version succeed
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
