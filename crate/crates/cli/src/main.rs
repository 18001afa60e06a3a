//! `complexity`: data complexity measures from the command line.

mod batch;
mod measure;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use complexity::report::{RunParams, Selection, DEFAULT_SEED, ORDINAL_ENCODING};
use complexity::IngestOptions;

#[derive(Parser, Debug)]
#[command(
    name = "complexity",
    version,
    about = "Classification data complexity measures"
)]
struct Cli {
    /// Log progress to standard error (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute measures for one dataset.
    Measure(measure::MeasureArgs),
    /// Compute measures for every dataset in a directory, one row each.
    Batch(batch::BatchArgs),
    /// Write a synthetic dataset.
    Synth(synth::SynthArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Options shared by `measure` and `batch`.
#[derive(Args, Debug, Clone)]
pub struct RunOptions {
    /// Label column: header name or zero-based index.
    #[arg(short, long)]
    pub label: String,

    /// Measure groups: feature, linearity, neighborhood, network,
    /// dimensionality, balance (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub groups: Vec<String>,

    /// Individual measures, e.g. N3,F1 (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub measures: Vec<String>,

    /// Seed for the stochastic measures (L3, N4).
    #[arg(long, env = "COMPLEXITY_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Neighborhood radius of the graph measures, in (0, 1].
    #[arg(long, env = "COMPLEXITY_EPSILON", default_value_t = complexity::network::DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Regularization of the linear classifier.
    #[arg(long = "svm-c", default_value_t = complexity::report::DEFAULT_SVM_C)]
    pub svm_c: f64,

    /// Fill missing cells with the column median or mode.
    #[arg(long)]
    pub impute: bool,

    /// Include per-measure elapsed times in the output.
    #[arg(long)]
    pub timings: bool,
}

impl RunOptions {
    pub fn selection(&self) -> Result<Selection> {
        let items: Vec<&String> = self.groups.iter().chain(&self.measures).collect();
        if items.is_empty() {
            return Ok(Selection::all());
        }
        Ok(Selection::parse(&items)?)
    }

    pub fn params(&self, impute: bool) -> RunParams {
        RunParams {
            seed: self.seed,
            epsilon: self.epsilon,
            svm_c: self.svm_c,
            impute,
            encoding: ORDINAL_ENCODING.to_string(),
        }
    }

    pub fn ingest(&self, impute: bool) -> IngestOptions {
        IngestOptions {
            delimiter: None,
            impute,
        }
    }
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// How a command finished when it did not hit an input error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    AllOk,
    SomeFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    let result = match &cli.command {
        Command::Measure(args) => measure::run(args),
        Command::Batch(args) => batch::run(args),
        Command::Synth(args) => synth::run(args),
    };
    match result {
        Ok(Outcome::AllOk) => ExitCode::SUCCESS,
        Ok(Outcome::SomeFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
