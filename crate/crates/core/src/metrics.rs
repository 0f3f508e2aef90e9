//! Cluster centers, sum of squared error and the Davies–Bouldin index.
//!
//! All functions take a partition as lists of member row indices, so they
//! score quantile clusterings, K-means output and external assignments
//! alike. Per-cluster terms are summed in cluster order.

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::quantile::median;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterKind {
    Mean,
    Median,
}

fn check_members<P: AsRef<[f64]>>(members: &[P]) -> Result<usize> {
    let first = members.first().ok_or(Error::EmptyCluster(0))?;
    let k = first.as_ref().len();
    if let Some(bad) = members.iter().find(|m| m.as_ref().len() != k) {
        return Err(Error::LengthMismatch {
            expected: k,
            found: bad.as_ref().len(),
        });
    }
    Ok(k)
}

pub fn mean_center<P: AsRef<[f64]>>(members: &[P]) -> Result<Vec<f64>> {
    let k = check_members(members)?;
    let mut c = vec![0.0; k];
    for m in members {
        for (acc, v) in c.iter_mut().zip(m.as_ref()) {
            *acc += v;
        }
    }
    let n = members.len() as f64;
    c.iter_mut().for_each(|v| *v /= n);
    Ok(c)
}

/// Component-wise median (mean of the two middle values for even counts;
/// both quantile conventions agree here).
pub fn median_center<P: AsRef<[f64]>>(members: &[P]) -> Result<Vec<f64>> {
    let k = check_members(members)?;
    (0..k)
        .map(|j| median(&members.iter().map(|m| m.as_ref()[j]).collect::<Vec<_>>()))
        .collect()
}

pub fn center<P: AsRef<[f64]>>(members: &[P], kind: CenterKind) -> Result<Vec<f64>> {
    match kind {
        CenterKind::Mean => mean_center(members),
        CenterKind::Median => median_center(members),
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn member_rows<'a>(data: &'a Dataset, members: &[usize]) -> Vec<&'a [f64]> {
    members.iter().map(|&i| data.row(i)).collect()
}

fn cluster_rows<'a>(data: &'a Dataset, groups: &[Vec<usize>]) -> Result<Vec<Vec<&'a [f64]>>> {
    groups
        .iter()
        .enumerate()
        .map(|(ci, g)| {
            if g.is_empty() {
                return Err(Error::EmptyCluster(ci));
            }
            if let Some(&bad) = g.iter().find(|&&i| i >= data.len()) {
                return Err(Error::InvalidConfig(format!("row {bad} out of range")));
            }
            Ok(member_rows(data, g))
        })
        .collect()
}

/// Σ over clusters Σ over members ‖x − center‖².
pub fn sse(data: &Dataset, groups: &[Vec<usize>], kind: CenterKind) -> Result<f64> {
    sse_with_power(data, groups, kind, 2.0)
}

/// Like [`sse`] with each Euclidean distance raised to `power` instead of 2.
pub fn sse_with_power(
    data: &Dataset,
    groups: &[Vec<usize>],
    kind: CenterKind,
    power: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for rows in cluster_rows(data, groups)? {
        total += cluster_error(&rows, &center(&rows, kind)?, power);
    }
    Ok(total)
}

fn cluster_error(rows: &[&[f64]], c: &[f64], power: f64) -> f64 {
    rows.iter()
        .map(|r| {
            let d2 = squared_euclidean(r, c);
            if power == 2.0 {
                d2
            } else {
                d2.sqrt().powf(power)
            }
        })
        .sum()
}

/// Mean (unsquared) distance of members to their centroid.
fn spread(rows: &[&[f64]], c: &[f64]) -> f64 {
    rows.iter().map(|r| euclidean(r, c)).sum::<f64>() / rows.len() as f64
}

/// Davies–Bouldin index with mean centroids: the average over clusters of
/// the worst `(σ_i + σ_j) / d(c_i, c_j)`. Lower is better.
pub fn davies_bouldin(data: &Dataset, groups: &[Vec<usize>]) -> Result<f64> {
    let rows = cluster_rows(data, groups)?;
    if rows.len() < 2 {
        return Err(Error::TooFewClusters(rows.len()));
    }
    let centers = rows
        .iter()
        .map(|r| mean_center(r))
        .collect::<Result<Vec<_>>>()?;
    let spreads: Vec<f64> = rows
        .iter()
        .zip(&centers)
        .map(|(r, c)| spread(r, c))
        .collect();
    davies_bouldin_from(&centers, &spreads)
}

fn davies_bouldin_from(centers: &[Vec<f64>], spreads: &[f64]) -> Result<f64> {
    let nc = centers.len();
    let mut total = 0.0;
    for i in 0..nc {
        let mut worst = f64::NEG_INFINITY;
        for j in (0..nc).filter(|&j| j != i) {
            let d = euclidean(&centers[i], &centers[j]);
            if d == 0.0 {
                return Err(Error::DegenerateClustering(i.min(j), i.max(j)));
            }
            worst = worst.max((spreads[i] + spreads[j]) / d);
        }
        total += worst;
    }
    Ok(total / nc as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterMetrics {
    pub label: String,
    pub population: usize,
    pub mean_center: Vec<f64>,
    pub median_center: Vec<f64>,
    pub sse_mean: f64,
    pub sse_median: f64,
    /// Mean distance of members to the mean center.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub cluster_count: usize,
    pub sse_mean: f64,
    pub sse_median: f64,
    pub davies_bouldin: f64,
    pub clusters: Vec<ClusterMetrics>,
}

impl MetricsReport {
    /// Scores a partition. `labels[i]` names `groups[i]`.
    pub fn compute(data: &Dataset, groups: &[Vec<usize>], labels: &[String]) -> Result<Self> {
        if labels.len() != groups.len() {
            return Err(Error::LengthMismatch {
                expected: groups.len(),
                found: labels.len(),
            });
        }
        let rows = cluster_rows(data, groups)?;
        if rows.len() < 2 {
            return Err(Error::TooFewClusters(rows.len()));
        }
        let mut clusters = Vec::with_capacity(rows.len());
        for (r, label) in rows.iter().zip(labels) {
            let mean_c = mean_center(r)?;
            let median_c = median_center(r)?;
            clusters.push(ClusterMetrics {
                label: label.clone(),
                population: r.len(),
                sse_mean: cluster_error(r, &mean_c, 2.0),
                sse_median: cluster_error(r, &median_c, 2.0),
                spread: spread(r, &mean_c),
                mean_center: mean_c,
                median_center: median_c,
            });
        }
        let centers: Vec<Vec<f64>> = clusters.iter().map(|c| c.mean_center.clone()).collect();
        let spreads: Vec<f64> = clusters.iter().map(|c| c.spread).collect();
        Ok(MetricsReport {
            cluster_count: clusters.len(),
            sse_mean: clusters.iter().map(|c| c.sse_mean).sum(),
            sse_median: clusters.iter().map(|c| c.sse_median).sum(),
            davies_bouldin: davies_bouldin_from(&centers, &spreads)?,
            clusters,
        })
    }
}

/// Groups observation indices by cluster id, in ascending id order. Unused
/// ids are dropped.
pub fn groups_from_assignment(assignment: &[usize]) -> Vec<Vec<usize>> {
    let max = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut groups = vec![vec![]; max];
    for (i, &c) in assignment.iter().enumerate() {
        groups[c].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}
