//! Independent reference implementations and shared property checks.
//!
//! The oracles here deliberately avoid calling into the library: centers,
//! order statistics and indices are recomputed from scratch with plain
//! loops so a bug in the library cannot hide in both places.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use qcluster::analysis::{empty_cells, EmptyCells};
use qcluster::kmeans::lloyd;
use qcluster::merge::{merge_step, merge_to_target};
use qcluster::metrics::{davies_bouldin, sse, CenterKind};
use qcluster::{cluster, Clustering, Convention, Dataset, Granularity};

pub fn dataset(rows: &[Vec<f64>]) -> Dataset {
    let k = rows[0].len();
    Dataset::new((1..=k).map(|j| format!("x{j}")).collect(), rows.to_vec()).unwrap()
}

pub fn nine_rows() -> Dataset {
    let rows = [
        (5., 6.),
        (5., 5.),
        (2., 4.),
        (2., 6.),
        (5., 6.),
        (2., 9.),
        (3., 7.),
        (10., 4.),
        (7., 8.),
    ];
    Dataset::new(
        vec!["attribute1".into(), "attribute2".into()],
        rows.iter().map(|&(a, b)| vec![a, b]).collect(),
    )
    .unwrap()
}

// ---- order statistics ----

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Middle element, or mean of the two middle elements.
pub fn oracle_median(values: &[f64]) -> f64 {
    let v = sorted(values);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Linear interpolation between order statistics at 1-based position
/// (n − 1)p + 1.
pub fn oracle_interp(values: &[f64], p: f64) -> f64 {
    let v = sorted(values);
    let pos = (v.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Tukey's lower and upper hinges: medians of the lower and upper halves,
/// each half including the median when n is odd.
pub fn oracle_hinges(values: &[f64]) -> (f64, f64) {
    let v = sorted(values);
    let half = v.len().div_ceil(2);
    (
        oracle_median(&v[..half]),
        oracle_median(&v[v.len() - half..]),
    )
}

// ---- metrics ----

fn oracle_mean(rows: &[&[f64]]) -> Vec<f64> {
    let mut c = vec![0.0; rows[0].len()];
    for r in rows {
        for j in 0..c.len() {
            c[j] += r[j];
        }
    }
    c.iter().map(|s| s / rows.len() as f64).collect()
}

fn oracle_coordinate_median(rows: &[&[f64]]) -> Vec<f64> {
    (0..rows[0].len())
        .map(|j| oracle_median(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..a.len() {
        s += (a[j] - b[j]).powi(2);
    }
    s
}

fn members<'a>(data: &'a Dataset, group: &[usize]) -> Vec<&'a [f64]> {
    group.iter().map(|&i| data.row(i)).collect()
}

pub fn oracle_sse(data: &Dataset, groups: &[Vec<usize>], median: bool) -> f64 {
    let mut total = 0.0;
    for g in groups {
        let rows = members(data, g);
        let c = if median {
            oracle_coordinate_median(&rows)
        } else {
            oracle_mean(&rows)
        };
        for r in &rows {
            total += dist2(r, &c);
        }
    }
    total
}

/// None when the index is undefined (fewer than two clusters or two
/// coincident centroids).
pub fn oracle_db(data: &Dataset, groups: &[Vec<usize>]) -> Option<f64> {
    if groups.len() < 2 {
        return None;
    }
    let rows: Vec<_> = groups.iter().map(|g| members(data, g)).collect();
    let centers: Vec<_> = rows.iter().map(|r| oracle_mean(r)).collect();
    let spread: Vec<f64> = rows
        .iter()
        .zip(&centers)
        .map(|(r, c)| r.iter().map(|x| dist2(x, c).sqrt()).sum::<f64>() / r.len() as f64)
        .collect();
    let mut total = 0.0;
    for i in 0..groups.len() {
        let mut worst = 0.0f64;
        for j in 0..groups.len() {
            if i == j {
                continue;
            }
            let d = dist2(&centers[i], &centers[j]).sqrt();
            if d == 0.0 {
                return None;
            }
            worst = worst.max((spread[i] + spread[j]) / d);
        }
        total += worst;
    }
    Some(total / groups.len() as f64)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

// ---- strategies ----

pub const GRANULARITIES: [Granularity; 3] = [
    Granularity::Halves,
    Granularity::Quartiles,
    Granularity::Deciles,
];
pub const CONVENTIONS: [Convention; 2] = [Convention::Interp, Convention::Hinges];

pub fn granularity() -> impl Strategy<Value = Granularity> {
    prop::sample::select(GRANULARITIES.to_vec())
}

pub fn convention() -> impl Strategy<Value = Convention> {
    prop::sample::select(CONVENTIONS.to_vec())
}

/// n × k matrices with small integer values (so ties are common), n ≤ 200,
/// k ≤ 6.
pub fn tied_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=6, 1usize..=200).prop_flat_map(|(k, n)| {
        prop::collection::vec(
            prop::collection::vec((-20i32..=20).prop_map(f64::from), k),
            n,
        )
    })
}

/// Like [`tied_rows`] but with continuous values.
pub fn real_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=6, 1usize..=200)
        .prop_flat_map(|(k, n)| prop::collection::vec(prop::collection::vec(-1e3f64..1e3, k), n))
}

pub fn rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop_oneof![tied_rows(), real_rows()]
}

/// Every column a permutation of distinct values, with n a multiple of g.
pub fn distinct_rows(g: Granularity) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let bins = usize::from(g.bins());
    (1usize..=6, 1usize..=(200 / bins)).prop_flat_map(move |(k, m)| {
        let n = m * bins;
        prop::collection::vec(
            Just((0..n).map(|v| v as f64 * 1.5 - 40.0).collect::<Vec<_>>()).prop_shuffle(),
            k,
        )
        .prop_map(move |cols| {
            (0..n)
                .map(|i| cols.iter().map(|c| c[i]).collect())
                .collect()
        })
    })
}

// ---- property checks ----

type Check = Result<(), TestCaseError>;

pub fn check_partition(rows: &[Vec<f64>], g: Granularity, conv: Convention) -> Check {
    let data = dataset(rows);
    let c = cluster(&data, g, conv).unwrap();
    prop_assert!(c.check_partition().is_ok());
    let mut seen = vec![false; rows.len()];
    let mut labels = BTreeSet::new();
    for cl in c.clusters() {
        prop_assert!(!cl.members.is_empty());
        prop_assert!(
            labels.insert(cl.label.clone()),
            "duplicate label {}",
            cl.label
        );
        for &m in &cl.members {
            prop_assert!(!seen[m], "row {m} in two clusters");
            seen[m] = true;
            prop_assert_eq!(&c.observation_labels()[m], &cl.label);
        }
    }
    prop_assert!(seen.iter().all(|&s| s));
    Ok(())
}

/// Applies a strictly increasing map to each attribute, a different one per
/// column, and checks every label survives.
pub fn check_monotone(rows: &[Vec<f64>], g: Granularity, conv: Convention, shift: f64) -> Check {
    let maps: [fn(f64) -> f64; 4] = [
        |x| 3.0 * x + 7.0,
        |x| x * x * x + x,
        |x| (x / 10.0).exp(),
        |x| x.cbrt(),
    ];
    let base = dataset(
        &rows
            .iter()
            .map(|r| r.iter().map(|x| x + shift).collect())
            .collect::<Vec<_>>(),
    );
    let moved = base.map_values(|j, x| maps[j % maps.len()](x)).unwrap();
    let a = cluster(&base, g, conv).unwrap();
    let b = cluster(&moved, g, conv).unwrap();
    prop_assert_eq!(a.observation_labels(), b.observation_labels());
    Ok(())
}

/// With distinct values and g | n every base bin of every attribute holds
/// exactly n/g rows.
pub fn check_balance(rows: &[Vec<f64>], g: Granularity, conv: Convention) -> Check {
    let data = dataset(rows);
    let c = cluster(&data, g, conv).unwrap();
    let bins = usize::from(g.bins());
    for j in 0..data.dim() {
        let mut counts = vec![0usize; bins];
        for l in c.observation_labels() {
            let b = l.tokens()[j].covered_bins(g);
            prop_assert_eq!(b.start(), b.end());
            counts[usize::from(*b.start()) - 1] += 1;
        }
        prop_assert!(
            counts.iter().all(|&x| x == rows.len() / bins),
            "attribute {j}: {counts:?}"
        );
    }
    Ok(())
}

pub fn check_metrics(rows: &[Vec<f64>], g: Granularity, conv: Convention) -> Check {
    let data = dataset(rows);
    let c = cluster(&data, g, conv).unwrap();
    let groups = c.groups();
    let tol = 1e-9;
    let s = sse(&data, &groups, CenterKind::Mean).unwrap();
    prop_assert!(close(s, oracle_sse(&data, &groups, false), tol));
    let s = sse(&data, &groups, CenterKind::Median).unwrap();
    prop_assert!(close(s, oracle_sse(&data, &groups, true), tol));
    match (davies_bouldin(&data, &groups), oracle_db(&data, &groups)) {
        (Ok(a), Some(b)) => prop_assert!(close(a, b, tol), "{a} vs {b}"),
        (Err(_), None) => {}
        (a, b) => {
            return Err(TestCaseError::fail(format!(
                "DB disagreement: {a:?} vs {b:?}"
            )))
        }
    }
    Ok(())
}

pub fn check_lloyd(rows: &[Vec<f64>], k: usize, starts: &[usize]) -> Check {
    let data = dataset(rows);
    let k = k.min(rows.len());
    let mut picked: Vec<usize> = vec![];
    for i in starts.iter().map(|&i| i % rows.len()).chain(0..rows.len()) {
        if picked.len() == k {
            break;
        }
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    let init: Vec<Vec<f64>> = picked.iter().map(|&i| rows[i].clone()).collect();
    let r = lloyd(&data, init, 50, 0.0).unwrap();
    prop_assert!(r.populations().iter().all(|&p| p > 0));
    for w in r.sse_history.windows(2) {
        prop_assert!(
            w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0),
            "SSE rose: {:?}",
            r.sse_history
        );
    }
    Ok(())
}

fn by_label(c: &Clustering) -> BTreeMap<String, Vec<usize>> {
    c.clusters()
        .iter()
        .map(|cl| (cl.label.to_string(), cl.members.clone()))
        .collect()
}

pub fn check_merge(rows: &[Vec<f64>], halves: bool, conv: Convention, target: usize) -> Check {
    let g = if halves {
        Granularity::Halves
    } else {
        Granularity::Quartiles
    };
    let data = dataset(rows);
    let c = cluster(&data, g, conv).unwrap();

    let same = merge_to_target(&c, &data, c.len()).unwrap();
    prop_assert!(same.steps.is_empty());
    prop_assert_eq!(&same.clustering, &c);

    let mut current = c;
    while current.len() > target.max(1) {
        let Some((next, step)) = merge_step(&current, &data).unwrap() else {
            break;
        };
        prop_assert!(next.check_partition().is_ok());
        prop_assert_eq!(next.len() + 1, current.len());
        let before = by_label(&current);
        let after = by_label(&next);
        let mut union = [
            before[&step.a.to_string()].clone(),
            before[&step.b.to_string()].clone(),
        ]
        .concat();
        union.sort_unstable();
        prop_assert_eq!(&after[&step.merged.to_string()], &union);
        prop_assert_eq!(step.population, union.len());
        for (label, m) in &before {
            if *label != step.a.to_string() && *label != step.b.to_string() {
                prop_assert_eq!(after.get(label), Some(m));
            }
        }
        current = next;
    }
    Ok(())
}

fn all_labels(g: Granularity, k: usize) -> BTreeSet<String> {
    let prefix = match g {
        Granularity::Halves => "H",
        Granularity::Quartiles => "Q",
        Granularity::Deciles => "D",
    };
    let mut out = BTreeSet::from([String::new()]);
    for _ in 0..k {
        out = out
            .iter()
            .flat_map(|s| (1..=g.bins()).map(move |b| format!("{s}{prefix}{b}")))
            .collect();
    }
    out
}

pub fn check_empty_cells(rows: &[Vec<f64>], g: Granularity, conv: Convention) -> Check {
    let data = dataset(rows);
    let c = cluster(&data, g, conv).unwrap();
    let limit = 65_536u128;
    match empty_cells(&c, limit) {
        EmptyCells::Enumerated {
            possible,
            observed,
            empty,
        } => {
            let all = all_labels(g, data.dim());
            prop_assert_eq!(possible, all.len() as u128);
            let seen: BTreeSet<String> =
                c.clusters().iter().map(|cl| cl.label.to_string()).collect();
            let empty: BTreeSet<String> = empty.iter().map(|l| l.to_string()).collect();
            prop_assert_eq!(observed, seen.len());
            prop_assert!(seen.is_disjoint(&empty));
            prop_assert_eq!(seen.union(&empty).cloned().collect::<BTreeSet<_>>(), all);
        }
        EmptyCells::NotEnumerable { possible, .. } => {
            prop_assert!(possible.is_none_or(|p| p > limit));
        }
    }
    Ok(())
}
