//! Quantile-bin clustering.
//!
//! Two passes: compute per-attribute quantile boundaries, then map each
//! value to the bin it falls in (values on a boundary go to the lower bin)
//! and group observations by the resulting label.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::label::{BinToken, ClusterLabel};
use crate::quantile::{build_grid, Convention, Granularity, QuantileGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub label: ClusterLabel,
    /// Ascending observation indices.
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn population(&self) -> usize {
        self.members.len()
    }
}

/// A partition of `0..n` keyed by label, sorted by canonical label string.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    granularity: Granularity,
    attribute_names: Vec<String>,
    grid: QuantileGrid,
    clusters: Vec<Cluster>,
    /// Initial (base) label of every observation; unchanged by merging.
    observation_labels: Vec<ClusterLabel>,
}

impl Clustering {
    pub(crate) fn from_parts(
        granularity: Granularity,
        attribute_names: Vec<String>,
        grid: QuantileGrid,
        mut clusters: Vec<Cluster>,
        observation_labels: Vec<ClusterLabel>,
    ) -> Result<Self> {
        for c in &mut clusters {
            c.members.sort_unstable();
        }
        clusters.sort_by(|a, b| a.label.cmp(&b.label));
        let c = Clustering {
            granularity,
            attribute_names,
            grid,
            clusters,
            observation_labels,
        };
        c.check_partition()?;
        Ok(c)
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn grid(&self) -> &QuantileGrid {
        &self.grid
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.observation_labels.len()
    }

    pub fn observation_labels(&self) -> &[ClusterLabel] {
        &self.observation_labels
    }

    pub fn get(&self, label: &ClusterLabel) -> Option<&Cluster> {
        self.clusters
            .binary_search_by(|c| c.label.cmp(label))
            .ok()
            .map(|i| &self.clusters[i])
    }

    /// Member index lists, in cluster order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }

    /// Cluster position of every observation.
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (ci, c) in self.clusters.iter().enumerate() {
            for &m in &c.members {
                out[m] = ci;
            }
        }
        out
    }

    /// Every index in `0..n` in exactly one non-empty cluster.
    pub fn check_partition(&self) -> Result<()> {
        let n = self.n();
        let mut seen = vec![false; n];
        for (ci, c) in self.clusters.iter().enumerate() {
            if c.members.is_empty() {
                return Err(Error::EmptyCluster(ci));
            }
            if c.label.len() != self.attribute_names.len() {
                return Err(Error::LengthMismatch {
                    expected: self.attribute_names.len(),
                    found: c.label.len(),
                });
            }
            for &m in &c.members {
                if m >= n || std::mem::replace(&mut seen[m], true) {
                    return Err(Error::InvalidConfig(format!(
                        "observation {m} is not in exactly one cluster"
                    )));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidConfig(format!(
                "observation {missing} is in no cluster"
            )));
        }
        Ok(())
    }
}

pub fn assign_label(observation: &[f64], grid: &QuantileGrid) -> Result<ClusterLabel> {
    if observation.len() != grid.dim() {
        return Err(Error::LengthMismatch {
            expected: grid.dim(),
            found: observation.len(),
        });
    }
    if observation.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    let g = grid.granularity();
    Ok(ClusterLabel::new(
        observation
            .iter()
            .enumerate()
            .map(|(j, &v)| BinToken::base(g, grid.bin_of(j, v)))
            .collect(),
    ))
}

pub fn cluster(
    dataset: &Dataset,
    granularity: Granularity,
    convention: Convention,
) -> Result<Clustering> {
    let grid = build_grid(dataset, granularity, convention)?;
    cluster_with_grid(dataset, grid)
}

/// Labels `dataset` against a precomputed grid.
pub fn cluster_with_grid(dataset: &Dataset, grid: QuantileGrid) -> Result<Clustering> {
    let labels = (0..dataset.len())
        .into_par_iter()
        .map(|i| assign_label(dataset.row(i), &grid))
        .collect::<Result<Vec<_>>>()?;

    let mut groups: BTreeMap<ClusterLabel, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l.clone()).or_default().push(i);
    }
    let clusters = groups
        .into_iter()
        .map(|(label, members)| Cluster { label, members })
        .collect();
    Clustering::from_parts(
        grid.granularity(),
        dataset.attribute_names().to_vec(),
        grid,
        clusters,
        labels,
    )
}

/// Plain-language reading of a label, one clause per attribute.
pub fn describe_label(label: &ClusterLabel, attribute_names: &[String], g: Granularity) -> String {
    label
        .tokens()
        .iter()
        .zip(attribute_names)
        .map(|(t, name)| format!("{name} {}", describe_token(*t, g)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn describe_token(t: BinToken, g: Granularity) -> String {
    match t {
        BinToken::Full => "unrestricted".into(),
        BinToken::Half(1) => "in bottom half".into(),
        BinToken::Half(_) => "in top half".into(),
        BinToken::Quartile(1) => "in bottom quartile".into(),
        BinToken::Quartile(4) => "in top quartile".into(),
        BinToken::Quartile(i) => format!("in quartile {i}"),
        BinToken::Decile(1) => "in bottom decile".into(),
        BinToken::Decile(i) if i == g.bins() => "in top decile".into(),
        BinToken::Decile(i) => format!("in decile {i}"),
    }
}
