//! Reports over a finished clustering: low-population (outlier) clusters,
//! label combinations that never occur, pattern queries on labels, and
//! purity against known class tags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::clustering::{describe_label, Cluster, Clustering};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::label::{parse_tokens, BinToken, ClusterLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutlierSelection {
    /// The `m` smallest clusters.
    Smallest(usize),
    /// Every cluster with population at most this.
    MaxPopulation(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierEntry {
    pub label: ClusterLabel,
    pub population: usize,
    pub semantics: String,
    pub members: Vec<String>,
}

/// Clusters in ascending population, ties by canonical label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub clusters: Vec<OutlierEntry>,
}

pub fn outlier_clusters(
    clustering: &Clustering,
    dataset: &Dataset,
    selection: OutlierSelection,
) -> Result<OutlierReport> {
    if selection == OutlierSelection::Smallest(0) {
        return Err(Error::InvalidConfig(
            "outlier count must be at least 1".into(),
        ));
    }
    let mut ranked: Vec<&Cluster> = clustering.clusters().iter().collect();
    // clusters are already in label order, so a stable sort keeps label ties ordered
    ranked.sort_by_key(|c| c.population());
    let chosen: Vec<&Cluster> = match selection {
        OutlierSelection::Smallest(m) => ranked.into_iter().take(m).collect(),
        OutlierSelection::MaxPopulation(t) => ranked
            .into_iter()
            .take_while(|c| c.population() <= t)
            .collect(),
    };
    Ok(OutlierReport {
        clusters: chosen
            .into_iter()
            .map(|c| OutlierEntry {
                label: c.label.clone(),
                population: c.population(),
                semantics: describe_label(
                    &c.label,
                    clustering.attribute_names(),
                    clustering.granularity(),
                ),
                members: c.members.iter().map(|&i| dataset.row_name(i)).collect(),
            })
            .collect(),
    })
}

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 65_536;

/// Base-granularity cells with no observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmptyCells {
    Enumerated {
        possible: u128,
        observed: usize,
        empty: Vec<ClusterLabel>,
    },
    NotEnumerable {
        /// `None` when `g^k` overflows.
        possible: Option<u128>,
        observed: usize,
    },
}

/// Cells are judged by each observation's base label, so a merged
/// clustering reports the same empty cells as the one it came from.
pub fn empty_cells(clustering: &Clustering, limit: u128) -> EmptyCells {
    let g = clustering.granularity();
    let k = clustering.attribute_names().len();
    let observed: BTreeSet<&ClusterLabel> = clustering.observation_labels().iter().collect();
    let possible = u128::from(g.bins()).checked_pow(k as u32);
    match possible {
        Some(p) if p <= limit => {
            let mut empty = vec![];
            let mut bins = vec![1u8; k];
            loop {
                let label = ClusterLabel::new(bins.iter().map(|&b| BinToken::base(g, b)).collect());
                if !observed.contains(&label) {
                    empty.push(label);
                }
                // odometer increment, last attribute fastest
                let mut pos = k;
                loop {
                    if pos == 0 {
                        empty.sort();
                        return EmptyCells::Enumerated {
                            possible: p,
                            observed: observed.len(),
                            empty,
                        };
                    }
                    pos -= 1;
                    if bins[pos] < g.bins() {
                        bins[pos] += 1;
                        break;
                    }
                    bins[pos] = 1;
                }
            }
        }
        _ => EmptyCells::NotEnumerable {
            possible,
            observed: observed.len(),
        },
    }
}

/// One positional constraint of a [`LabelPattern`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenConstraint {
    Any,
    /// The cluster's token must lie within the union of these tokens.
    OneOf(Vec<BinToken>),
    /// The cluster's token must not touch any of these tokens.
    NoneOf(Vec<BinToken>),
}

/// Per-attribute constraints, written as comma-separated fields:
///
/// ```text
/// pattern    := constraint ("," constraint)*
/// constraint := "*" | "!"? set
/// set        := token ("|" token)* | "{}"
/// token      := "Q1".."Q4" | "H1" | "H2" | "D1".."D10" | "F"
/// ```
///
/// For example `!Q4,Q4,Q4,Q4,Q4` or `Q1|Q2,*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPattern(pub Vec<TokenConstraint>);

impl FromStr for LabelPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::MalformedPattern(format!("{s:?}: {why}"));
        if s.trim().is_empty() {
            return Err(bad("empty pattern"));
        }
        let fields = s
            .split(',')
            .map(|field| {
                let field = field.trim();
                if field == "*" {
                    return Ok(TokenConstraint::Any);
                }
                let (negated, set) = match field.strip_prefix('!') {
                    Some(rest) => (true, rest.trim()),
                    None => (false, field),
                };
                let tokens = if set == "{}" {
                    vec![]
                } else {
                    set.split('|')
                        .map(|t| match parse_tokens(t.trim()) {
                            Ok(v) if v.len() == 1 => Ok(v[0]),
                            _ => Err(bad(&format!("bad token {t:?}"))),
                        })
                        .collect::<Result<Vec<_>>>()?
                };
                Ok(if negated {
                    TokenConstraint::NoneOf(tokens)
                } else {
                    TokenConstraint::OneOf(tokens)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LabelPattern(fields))
    }
}

impl fmt::Display for LabelPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ts: &[BinToken]| {
            if ts.is_empty() {
                "{}".to_string()
            } else {
                ts.iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join("|")
            }
        };
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|c| match c {
                TokenConstraint::Any => "*".to_string(),
                TokenConstraint::OneOf(ts) => join(ts),
                TokenConstraint::NoneOf(ts) => format!("!{}", join(ts)),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

pub fn query_labels<'a>(
    clustering: &'a Clustering,
    pattern: &LabelPattern,
) -> Result<Vec<&'a Cluster>> {
    let k = clustering.attribute_names().len();
    if pattern.0.len() != k {
        return Err(Error::MalformedPattern(format!(
            "{} constraints for {k} attributes",
            pattern.0.len()
        )));
    }
    let g = clustering.granularity();
    let bins_of =
        |ts: &[BinToken]| -> BTreeSet<u8> { ts.iter().flat_map(|t| t.covered_bins(g)).collect() };
    let sets: Vec<(Option<bool>, BTreeSet<u8>)> = pattern
        .0
        .iter()
        .map(|c| match c {
            TokenConstraint::Any => (None, BTreeSet::new()),
            TokenConstraint::OneOf(ts) => (Some(true), bins_of(ts)),
            TokenConstraint::NoneOf(ts) => (Some(false), bins_of(ts)),
        })
        .collect();
    Ok(clustering
        .clusters()
        .iter()
        .filter(|c| {
            c.label.tokens().iter().zip(&sets).all(|(t, (mode, set))| {
                let mut covered = t.covered_bins(g);
                match mode {
                    None => true,
                    Some(true) => covered.all(|b| set.contains(&b)),
                    Some(false) => !covered.any(|b| set.contains(&b)),
                }
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterPurity {
    pub label: ClusterLabel,
    pub population: usize,
    /// Counts for every class in the dataset, including zeros.
    pub histogram: BTreeMap<String, usize>,
    pub pure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityReport {
    pub classes: Vec<String>,
    pub clusters: Vec<ClusterPurity>,
    pub total_clusters: usize,
    pub pure_clusters: usize,
    pub pure_population: usize,
    pub n: usize,
    pub pure_cluster_pct: f64,
    pub pure_population_pct: f64,
}

impl PurityReport {
    pub fn mixed(&self) -> impl Iterator<Item = &ClusterPurity> {
        self.clusters.iter().filter(|c| !c.pure)
    }
}

/// A cluster is pure when exactly one class occurs in it.
pub fn purity(clustering: &Clustering, classes: &[String]) -> Result<PurityReport> {
    if classes.len() != clustering.n() {
        return Err(Error::MissingClassTags);
    }
    let names: Vec<String> = classes
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let clusters: Vec<ClusterPurity> = clustering
        .clusters()
        .iter()
        .map(|c| {
            let mut histogram: BTreeMap<String, usize> =
                names.iter().map(|n| (n.clone(), 0)).collect();
            for &m in &c.members {
                *histogram.get_mut(&classes[m]).expect("class in name set") += 1;
            }
            let present = histogram.values().filter(|&&v| v > 0).count();
            ClusterPurity {
                label: c.label.clone(),
                population: c.population(),
                histogram,
                pure: present == 1,
            }
        })
        .collect();
    let pure_clusters = clusters.iter().filter(|c| c.pure).count();
    let pure_population = clusters
        .iter()
        .filter(|c| c.pure)
        .map(|c| c.population)
        .sum();
    let n = clustering.n();
    Ok(PurityReport {
        classes: names,
        total_clusters: clusters.len(),
        pure_cluster_pct: 100.0 * pure_clusters as f64 / clusters.len() as f64,
        pure_population_pct: 100.0 * pure_population as f64 / n as f64,
        pure_clusters,
        pure_population,
        n,
        clusters,
    })
}

pub fn purity_of(clustering: &Clustering, dataset: &Dataset) -> Result<PurityReport> {
    purity(
        clustering,
        dataset.classes().ok_or(Error::MissingClassTags)?,
    )
}
