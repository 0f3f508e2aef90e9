//! Label-preserving agglomerative coarsening.
//!
//! Two clusters may merge only when their labels differ at exactly one
//! attribute and the two tokens there are siblings: `Q1+Q2 → H1`,
//! `Q3+Q4 → H2`, `H1+H2 → F`. The merged label keeps a plain reading
//! ("bottom half", "unrestricted") instead of inventing a middle range.
//!
//! Candidates are ranked by label distance, then by the Euclidean distance
//! between the two clusters' mean centers, then by label strings.

use serde::Serialize;

use crate::clustering::{Cluster, Clustering};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::label::{BinToken, ClusterLabel};
use crate::metrics::{euclidean, mean_center};
use crate::quantile::Granularity;

/// Σ over attributes of the gap between the two tokens' bin ranges (zero
/// when they overlap). For single-bin tokens this is `|i − j|`.
pub fn label_distance(a: &ClusterLabel, b: &ClusterLabel, g: Granularity) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.tokens()
        .iter()
        .zip(b.tokens())
        .map(|(x, y)| {
            let (x, y) = (x.covered_bins(g), y.covered_bins(g));
            if x.end() < y.start() {
                u32::from(y.start() - x.end())
            } else if y.end() < x.start() {
                u32::from(x.start() - y.end())
            } else {
                0
            }
        })
        .sum())
}

/// The coarser token covering exactly `a ∪ b`, if the two are siblings.
pub fn coarsen(a: BinToken, b: BinToken, g: Granularity) -> Option<BinToken> {
    use BinToken::*;
    let (lo, hi) = if a.covered_bins(g).start() <= b.covered_bins(g).start() {
        (a, b)
    } else {
        (b, a)
    };
    match (g, lo, hi) {
        (Granularity::Quartiles, Quartile(1), Quartile(2)) => Some(Half(1)),
        (Granularity::Quartiles, Quartile(3), Quartile(4)) => Some(Half(2)),
        (Granularity::Quartiles | Granularity::Halves, Half(1), Half(2)) => Some(Full),
        _ => None,
    }
}

/// The merged label when `a` and `b` are sibling-mergeable.
pub fn sibling_merge(a: &ClusterLabel, b: &ClusterLabel, g: Granularity) -> Option<ClusterLabel> {
    if a.len() != b.len() {
        return None;
    }
    let mut diff = a
        .tokens()
        .iter()
        .zip(b.tokens())
        .enumerate()
        .filter(|(_, (x, y))| x != y);
    let (pos, (x, y)) = diff.next()?;
    if diff.next().is_some() {
        return None;
    }
    let merged = coarsen(*x, *y, g)?;
    let mut tokens = a.tokens().to_vec();
    tokens[pos] = merged;
    Some(ClusterLabel::new(tokens))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeStep {
    pub a: ClusterLabel,
    pub b: ClusterLabel,
    pub merged: ClusterLabel,
    pub label_distance: u32,
    /// Distance between the two mean centers, recorded when it decided
    /// between candidates at the same label distance.
    pub tie_break_distance: Option<f64>,
    pub population: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergePlan {
    pub target: usize,
    pub initial_clusters: usize,
    pub steps: Vec<MergeStep>,
    #[serde(skip)]
    pub clustering: Clustering,
}

fn check_granularity(g: Granularity) -> Result<()> {
    if g == Granularity::Deciles {
        return Err(Error::UnsupportedGranularity);
    }
    Ok(())
}

struct Candidate {
    i: usize,
    j: usize,
    merged: ClusterLabel,
    label_distance: u32,
    center_distance: f64,
}

/// Performs the single best sibling merge, or returns `None` when no two
/// clusters are siblings.
pub fn merge_step(
    clustering: &Clustering,
    dataset: &Dataset,
) -> Result<Option<(Clustering, MergeStep)>> {
    let g = clustering.granularity();
    check_granularity(g)?;
    let clusters = clustering.clusters();
    let centers = clusters
        .iter()
        .map(|c| {
            mean_center(
                &c.members
                    .iter()
                    .map(|&i| dataset.row(i))
                    .collect::<Vec<_>>(),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut candidates = vec![];
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            if let Some(merged) = sibling_merge(&clusters[i].label, &clusters[j].label, g) {
                candidates.push(Candidate {
                    i,
                    j,
                    merged,
                    label_distance: label_distance(&clusters[i].label, &clusters[j].label, g)?,
                    center_distance: euclidean(&centers[i], &centers[j]),
                });
            }
        }
    }
    // clusters are in label order, so (i, j) order is label order
    let best_label = match candidates.iter().map(|c| c.label_distance).min() {
        Some(d) => d,
        None => return Ok(None),
    };
    let tied: Vec<&Candidate> = candidates
        .iter()
        .filter(|c| c.label_distance == best_label)
        .collect();
    let chosen = tied
        .iter()
        .min_by(|a, b| {
            a.center_distance
                .total_cmp(&b.center_distance)
                .then((a.i, a.j).cmp(&(b.i, b.j)))
        })
        .expect("non-empty");

    let (a, b) = (&clusters[chosen.i], &clusters[chosen.j]);
    let mut members = [a.members.as_slice(), b.members.as_slice()].concat();
    members.sort_unstable();
    let step = MergeStep {
        a: a.label.clone(),
        b: b.label.clone(),
        merged: chosen.merged.clone(),
        label_distance: chosen.label_distance,
        tie_break_distance: (tied.len() > 1).then_some(chosen.center_distance),
        population: members.len(),
    };
    let mut next: Vec<Cluster> = clusters
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != chosen.i && *k != chosen.j)
        .map(|(_, c)| c.clone())
        .collect();
    next.push(Cluster {
        label: chosen.merged.clone(),
        members,
    });
    let merged = Clustering::from_parts(
        g,
        clustering.attribute_names().to_vec(),
        clustering.grid().clone(),
        next,
        clustering.observation_labels().to_vec(),
    )?;
    Ok(Some((merged, step)))
}

/// Merges until at most `target` clusters remain or no sibling pair is
/// left.
pub fn merge_to_target(
    clustering: &Clustering,
    dataset: &Dataset,
    target: usize,
) -> Result<MergePlan> {
    if target < 1 {
        return Err(Error::InvalidConfig(
            "merge target must be at least 1".into(),
        ));
    }
    check_granularity(clustering.granularity())?;
    let mut current = clustering.clone();
    let mut steps = vec![];
    while current.len() > target {
        match merge_step(&current, dataset)? {
            Some((next, step)) => {
                current = next;
                steps.push(step);
            }
            None => break,
        }
    }
    Ok(MergePlan {
        target,
        initial_clusters: clustering.len(),
        steps,
        clustering: current,
    })
}
