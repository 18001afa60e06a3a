use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),

    #[error("input is empty")]
    EmptyInput,

    #[error("label column `{0}` not found")]
    LabelColumnNotFound(String),

    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },

    #[error("column `{0}` has no observed values to impute from")]
    NothingToImpute(String),

    #[error("non-finite value in numeric column `{0}`")]
    NonFinite(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("measure requires at least {required} classes, found {found}")]
    TooFewClasses { required: usize, found: usize },

    #[error("class `{class}` has {size} examples, at least {required} required")]
    ClassTooSmall {
        class: String,
        size: usize,
        required: usize,
    },

    #[error("cannot aggregate an empty sequence")]
    EmptyAggregate,

    #[error("class `{0}` contains every example")]
    DominantClass(String),

    #[error("all features are constant, total variance is zero")]
    ZeroVariance,

    #[error("unknown measure or group `{0}`")]
    UnknownMeasure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
