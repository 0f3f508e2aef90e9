//! Quantile-bin clustering.
//!
//! Each observation is labeled, attribute by attribute, with the quantile
//! bin its value falls in (`H1`/`H2` for halves, `Q1`..`Q4` for quartiles,
//! `D1`..`D10` for deciles). Observations sharing a label form a cluster,
//! and the label reads directly as the cluster's meaning, e.g. `Q4Q1` is
//! "top quartile on the first attribute, bottom quartile on the second".
//!
//! Around the core labeling engine the crate provides SSE and
//! Davies–Bouldin scoring, a K-means baseline, outlier/empty-cell/purity
//! reports, and sibling merging (`Q1+Q2 → H1`, `H1+H2 → F`) that coarsens
//! clusters without losing their semantics.

pub mod analysis;
pub mod cli;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod kmeans;
pub mod label;
pub mod merge;
pub mod metrics;
pub mod quantile;
pub mod report;

pub use clustering::{assign_label, cluster, describe_label, Cluster, Clustering};
pub use dataset::{fixture, load_csv, Dataset, LoadOptions};
pub use error::{Error, Result};
pub use label::{BinToken, ClusterLabel};
pub use quantile::{build_grid, quantile, Convention, Granularity, QuantileGrid};
