//! Lloyd's K-means with random-point initialization and restarts.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::squared_euclidean;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Stop once at most this fraction of points changes cluster in an
    /// iteration. Zero waits for a stable assignment.
    pub tolerance: f64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        KMeansConfig {
            k,
            max_iterations: 100,
            restarts: 10,
            seed: 0,
            tolerance: 0.0,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidKMeans(m));
        if self.k < 1 {
            return fail("k must be at least 1".into());
        }
        if self.k > n {
            return fail(format!("k = {} exceeds the {n} observations", self.k));
        }
        if self.restarts < 1 || self.max_iterations < 1 {
            return fail("restarts and max_iterations must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.tolerance) {
            return fail(format!("tolerance {} outside [0, 1]", self.tolerance));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansResult {
    /// Cluster id per observation, in `0..k`.
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// SSE after every center update.
    pub sse_history: Vec<f64>,
    /// Which restart produced this result.
    pub restart: usize,
}

impl KMeansResult {
    pub fn populations(&self) -> Vec<usize> {
        let mut p = vec![0; self.centers.len()];
        for &c in &self.assignment {
            p[c] += 1;
        }
        p
    }

    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = vec![vec![]; self.centers.len()];
        for (i, &c) in self.assignment.iter().enumerate() {
            g[c].push(i);
        }
        g
    }
}

/// Best result (lowest SSE, then lowest restart index) over all restarts.
pub fn kmeans(data: &Dataset, config: &KMeansConfig) -> Result<KMeansResult> {
    config.validate(data.len())?;
    let runs: Vec<KMeansResult> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let init = sample(&mut rng, data.len(), config.k)
                .into_iter()
                .map(|i| data.row(i).to_vec())
                .collect();
            let mut res = lloyd_unchecked(data, init, config.max_iterations, config.tolerance);
            res.restart = r;
            res
        })
        .collect();
    Ok(runs
        .into_iter()
        .min_by(|a, b| a.sse.total_cmp(&b.sse).then(a.restart.cmp(&b.restart)))
        .expect("at least one restart"))
}

/// A single Lloyd run from the given starting centers.
pub fn lloyd(
    data: &Dataset,
    initial_centers: Vec<Vec<f64>>,
    max_iterations: usize,
    tolerance: f64,
) -> Result<KMeansResult> {
    let mut cfg = KMeansConfig::new(initial_centers.len());
    cfg.max_iterations = max_iterations;
    cfg.tolerance = tolerance;
    cfg.validate(data.len())?;
    if let Some(c) = initial_centers.iter().find(|c| c.len() != data.dim()) {
        return Err(Error::LengthMismatch {
            expected: data.dim(),
            found: c.len(),
        });
    }
    Ok(lloyd_unchecked(
        data,
        initial_centers,
        max_iterations,
        tolerance,
    ))
}

fn nearest(row: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = squared_euclidean(row, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd_unchecked(
    data: &Dataset,
    mut centers: Vec<Vec<f64>>,
    max_iterations: usize,
    tolerance: f64,
) -> KMeansResult {
    let n = data.len();
    let k = centers.len();
    let mut assignment = vec![usize::MAX; n];
    let mut history = vec![];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        let mut changed = 0;
        let mut dist = vec![0.0; n];
        for (i, row) in data.rows().enumerate() {
            let (c, d) = nearest(row, &centers);
            if assignment[i] != c {
                changed += 1;
                assignment[i] = c;
            }
            dist[i] = d;
        }
        changed += repair_empty(&mut assignment, &mut dist, k);
        centers = recompute_centers(data, &assignment, k);
        history.push(total_sse(data, &assignment, &centers));
        if changed as f64 <= tolerance * n as f64 {
            converged = true;
            break;
        }
    }

    KMeansResult {
        sse: *history.last().expect("at least one iteration"),
        assignment,
        centers,
        iterations,
        converged,
        sse_history: history,
        restart: 0,
    }
}

/// Gives every empty cluster the point farthest from its current center,
/// taken from a cluster that keeps at least one member. Returns the number
/// of points moved.
fn repair_empty(assignment: &mut [usize], dist: &mut [f64], k: usize) -> usize {
    let mut counts = vec![0usize; k];
    for &c in assignment.iter() {
        counts[c] += 1;
    }
    let mut moved = 0;
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let far = (0..assignment.len())
            .filter(|&i| counts[assignment[i]] > 1)
            .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
            .expect("k <= n leaves a donor cluster");
        counts[assignment[far]] -= 1;
        counts[empty] += 1;
        assignment[far] = empty;
        dist[far] = 0.0;
        moved += 1;
    }
    moved
}

fn recompute_centers(data: &Dataset, assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; data.dim()]; k];
    let mut counts = vec![0usize; k];
    for (row, &c) in data.rows().zip(assignment) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        s.iter_mut().for_each(|v| *v /= n as f64);
    }
    sums
}

fn total_sse(data: &Dataset, assignment: &[usize], centers: &[Vec<f64>]) -> f64 {
    data.rows()
        .zip(assignment)
        .map(|(row, &c)| squared_euclidean(row, &centers[c]))
        .sum()
}

/// Centers per cluster per attribute, for reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentersTable {
    pub attributes: Vec<String>,
    pub populations: Vec<usize>,
    /// `centers[c][j]` is attribute `j` of cluster `c`.
    pub centers: Vec<Vec<f64>>,
}

pub fn centers_table(result: &KMeansResult, attribute_names: &[String]) -> CentersTable {
    CentersTable {
        attributes: attribute_names.to_vec(),
        populations: result.populations(),
        centers: result.centers.clone(),
    }
}
