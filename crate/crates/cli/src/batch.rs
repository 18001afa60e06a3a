use std::fs::{self, File};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use complexity::report::{compute_all, csv_header, csv_lines, MeasureId, RunParams, Selection};
use complexity::{load_dataset, LabelColumn};
use rayon::prelude::*;
use serde::Deserialize;

use crate::measure::dataset_id;
use crate::{emit, Outcome, RunOptions};

const EXTENSIONS: [&str; 2] = ["csv", "tsv"];

#[derive(Args, Debug)]
pub struct BatchArgs {
    /// Directory of `.csv` / `.tsv` datasets. A file `NAME.csv.toml` next
    /// to `NAME.csv` may override `label` and `impute` for that file.
    pub dir: PathBuf,

    #[command(flatten)]
    pub run: RunOptions,

    /// Datasets processed concurrently (defaults to the number of cores).
    #[arg(short, long)]
    pub jobs: Option<usize>,

    /// Write the matrix here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Per-file overrides read from a sidecar file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    label: Option<String>,
    impute: Option<bool>,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".toml");
    PathBuf::from(name)
}

fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(Sidecar::default());
    }
    let text = fs::read_to_string(&side).with_context(|| format!("reading {}", side.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", side.display()))
}

/// Dataset files of `dir`, sorted by name.
fn dataset_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in
        fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?
    {
        let path = entry?.path();
        let matches = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)));
        if matches && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// One output row and whether everything in it succeeded.
fn process(
    path: &Path,
    run: &RunOptions,
    selection: &Selection,
    ids: &[MeasureId],
) -> (Vec<String>, bool) {
    let id = dataset_id(path);
    let loaded = (|| -> Result<_> {
        let sidecar = read_sidecar(path)?;
        let label = sidecar.label.unwrap_or_else(|| run.label.clone());
        let impute = sidecar.impute.unwrap_or(run.impute);
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let dataset = load_dataset(file, &LabelColumn::Name(label), &run.ingest(impute))?;
        Ok((dataset, run.params(impute)))
    })();
    let computed = loaded.and_then(|(dataset, params): (_, RunParams)| {
        Ok(compute_all(&dataset, &id, selection, &params)?)
    });
    match computed {
        Ok(report) => {
            log::info!(
                "{}: {} measures failed",
                path.display(),
                report.failed_count()
            );
            (report.csv_record(ids), report.failed_count() == 0)
        }
        Err(e) => {
            log::warn!("{}: {e:#}", path.display());
            let mut row = vec![id, String::new(), String::new(), String::new()];
            row.extend(ids.iter().map(|_| String::new()));
            row.push(format!("{e:#}"));
            (row, false)
        }
    }
}

pub fn run(args: &BatchArgs) -> Result<Outcome> {
    let selection = args.run.selection()?;
    args.run.params(args.run.impute).validate()?;
    let files = dataset_files(&args.dir)?;
    if files.is_empty() {
        bail!("no .csv or .tsv files in {}", args.dir.display());
    }
    let ids = selection.ids().to_vec();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        pool = pool.num_threads(jobs.max(1));
    }
    let pool = pool.build().context("starting worker pool")?;
    let rows: Vec<(Vec<String>, bool)> = pool.install(|| {
        files
            .par_iter()
            .map(|f| process(f, &args.run, &selection, &ids))
            .collect()
    });

    let all_ok = rows.iter().all(|r| r.1);
    let mut records = vec![csv_header(&ids)];
    records.extend(rows.into_iter().map(|r| r.0));
    emit(args.output.as_ref(), &csv_lines(&records))?;
    Ok(if all_ok {
        Outcome::AllOk
    } else {
        Outcome::SomeFailed
    })
}
