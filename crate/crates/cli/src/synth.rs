use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use complexity::synth;

use crate::{emit, Outcome};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    /// Gaussian blobs with centers along the diagonal.
    Clusters,
    /// Concentric circles, one class per radius.
    Rings,
    /// Points 0..n-1 on a line with alternating labels.
    AlternatingLine,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(value_enum)]
    pub fixture: Fixture,

    /// Examples per class (total examples for alternating-line).
    #[arg(long, default_value_t = 50)]
    pub n: usize,

    /// Number of classes (clusters only).
    #[arg(long, default_value_t = 2)]
    pub classes: usize,

    /// Distance between consecutive class centers along each axis.
    #[arg(long = "sep", default_value_t = 5.0)]
    pub separation: f64,

    /// Standard deviation of each cluster.
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,

    /// Number of features (clusters only).
    #[arg(long, default_value_t = 2)]
    pub dims: usize,

    /// Ring radii, one class each (comma-separated).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0])]
    pub radii: Vec<f64>,

    /// Fraction of labels to move to another class afterwards.
    #[arg(long, default_value_t = 0.0)]
    pub flip: f64,

    /// Seed for the generator; label flips use seed + 1.
    #[arg(long, env = "COMPLEXITY_SEED", default_value_t = complexity::report::DEFAULT_SEED)]
    pub seed: u64,

    /// Write the dataset here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &SynthArgs) -> Result<Outcome> {
    let dataset = match args.fixture {
        Fixture::Clusters => synth::make_clusters_nd(
            args.n,
            args.classes,
            args.dims,
            args.separation,
            args.spread,
            args.seed,
        )?,
        Fixture::Rings => synth::make_rings(args.n, &args.radii, args.seed)?,
        Fixture::AlternatingLine => synth::alternating_line(args.n)?,
    };
    let dataset = if args.flip > 0.0 {
        synth::flip_labels(&dataset, args.flip, args.seed.wrapping_add(1))?
    } else {
        dataset
    };
    let mut buffer = Vec::new();
    dataset.write_delimited(&mut buffer, b',')?;
    emit(args.output.as_ref(), &String::from_utf8(buffer)?)?;
    Ok(Outcome::AllOk)
}
