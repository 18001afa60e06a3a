//! Data complexity measures for labeled tabular classification datasets.
//!
//! A [`Dataset`] is loaded from delimited text (or built in memory), and
//! [`report::compute_all`] evaluates any subset of the 22 measures into a
//! [`report::ComplexityReport`]. Each measure is also available as a plain
//! function in its group module. All measures are oriented so that higher
//! values indicate a harder problem.

pub mod balance;
pub mod dataset;
pub mod dimensionality;
pub mod distance;
pub mod error;
pub mod feature;
mod linalg;
pub mod linearity;
pub mod neighborhood;
pub mod network;
pub mod report;
pub mod svm;
pub mod synth;

pub use dataset::{
    load_dataset, Dataset, DatasetView, FeatureColumn, FeatureKind, IngestOptions, LabelColumn,
    NumericMatrix, OvoResult,
};
pub use distance::DistanceMatrix;
pub use error::{Error, Result};
pub use report::{compute_all, ComplexityReport, MeasureId, MeasureResult, RunParams, Selection};
