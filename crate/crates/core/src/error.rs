use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),

    #[error("column not found: {0}")]
    MissingColumn(String),

    #[error("row {row}, column {column}: expected a number, found {value:?}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column {column}: value is not finite")]
    NonFinite { row: usize, column: String },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("unknown fixture {0:?} (expected \"country\" or \"iris\")")]
    UnknownFixture(String),

    #[error("quantile of an empty list")]
    EmptyInput,

    #[error("quantile fraction {0} outside [0, 1]")]
    InvalidFraction(f64),

    #[error("non-finite value in input")]
    NonFiniteValue,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("cluster {0} has no members")]
    EmptyCluster(usize),

    #[error("need ≥ 2 clusters, found {0}")]
    TooFewClusters(usize),

    #[error("degenerate clustering: clusters {0} and {1} share a centroid")]
    DegenerateClustering(usize, usize),

    #[error("invalid k-means configuration: {0}")]
    InvalidKMeans(String),

    #[error("malformed label pattern: {0}")]
    MalformedPattern(String),

    #[error("malformed cluster label: {0}")]
    MalformedLabel(String),

    #[error("dataset has no class tags")]
    MissingClassTags,

    #[error("merging is only defined for halves and quartiles")]
    UnsupportedGranularity,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by how the tool was invoked rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::MissingColumn(_)
                | Error::UnknownFixture(_)
                | Error::InvalidConfig(_)
                | Error::MalformedPattern(_)
                | Error::InvalidKMeans(_)
                | Error::UnsupportedGranularity
        )
    }
}
