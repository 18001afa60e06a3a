use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use complexity::report::compute_all;
use complexity::{load_dataset, LabelColumn};

use crate::{emit, Format, Outcome, RunOptions};

#[derive(Args, Debug)]
pub struct MeasureArgs {
    /// Delimited-text dataset (comma or tab separated, with a header).
    pub input: PathBuf,

    #[command(flatten)]
    pub run: RunOptions,

    /// Output format; defaults to a table on the terminal and json when
    /// writing to a file.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Dataset identifier used in reports: the file name without extension.
pub fn dataset_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run(args: &MeasureArgs) -> Result<Outcome> {
    let selection = args.run.selection()?;
    let params = args.run.params(args.run.impute);
    params.validate()?;
    let file =
        File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let dataset = load_dataset(
        file,
        &LabelColumn::Name(args.run.label.clone()),
        &args.run.ingest(args.run.impute),
    )
    .with_context(|| format!("loading {}", args.input.display()))?;
    log::info!(
        "loaded {}: n={} m={} classes={}",
        args.input.display(),
        dataset.n(),
        dataset.m(),
        dataset.n_classes()
    );

    let report = compute_all(&dataset, &dataset_id(&args.input), &selection, &params)?;
    let format = args.format.unwrap_or(if args.output.is_some() {
        Format::Json
    } else {
        Format::Table
    });
    let text = match format {
        Format::Json => report.to_json(args.run.timings),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(args.run.timings),
    };
    emit(args.output.as_ref(), &text)?;
    Ok(if report.failed_count() == 0 {
        Outcome::AllOk
    } else {
        Outcome::SomeFailed
    })
}
