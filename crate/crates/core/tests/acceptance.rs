//! Acceptance suite. Prints one PASS/FAIL line per criterion, with the
//! measured values underneath, and exits non-zero if any criterion fails.
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use qcluster::analysis::{empty_cells, purity_of, EmptyCells};
use qcluster::kmeans::{kmeans, KMeansConfig};
use qcluster::merge::label_distance;
use qcluster::metrics::{davies_bouldin, sse, CenterKind};
use qcluster::quantile::median;
use qcluster::report::fmt_sig;
use qcluster::{
    assign_label, build_grid, cluster, describe_label, fixture, ClusterLabel, Convention,
    Granularity,
};

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: vec![],
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.pass &= ok;
        self.details.push(format!(
            "{} {}",
            if ok { "ok  " } else { "MISS" },
            what.into()
        ));
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(format!("     {}", what.into()));
    }
}

fn within(actual: f64, expected: f64, rel: f64) -> bool {
    (actual - expected).abs() <= rel * expected.abs()
}

fn pct(actual: f64, expected: f64) -> String {
    format!("{:+.2}%", 100.0 * (actual - expected) / expected)
}

fn nine_row_golden() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let d = nine_rows();
    let c = cluster(&d, Granularity::Halves, Convention::Interp).unwrap();
    let elapsed = start.elapsed();

    let medians = (median(&d.column(0)).unwrap(), median(&d.column(1)).unwrap());
    o.check(
        medians == (5.0, 6.0),
        format!("medians {medians:?} == (5, 6)"),
    );
    let expected = [
        "H1H1", "H1H1", "H1H1", "H1H1", "H1H1", "H1H2", "H1H2", "H2H1", "H2H2",
    ];
    let got: Vec<String> = c
        .observation_labels()
        .iter()
        .map(|l| l.to_string())
        .collect();
    o.check(got == expected, format!("row labels {got:?}"));
    let clusters: Vec<(String, Vec<usize>)> = c
        .clusters()
        .iter()
        .map(|cl| (cl.label.to_string(), cl.members.clone()))
        .collect();
    let want = vec![
        ("H1H1".to_string(), vec![0, 1, 2, 3, 4]),
        ("H1H2".to_string(), vec![5, 6]),
        ("H2H1".to_string(), vec![7]),
        ("H2H2".to_string(), vec![8]),
    ];
    o.check(clusters == want, format!("clusters {clusters:?}"));
    let pops: Vec<usize> = c.clusters().iter().map(|cl| cl.population()).collect();
    o.check(
        pops == [5, 2, 1, 1],
        format!("populations {pops:?} == [5, 2, 1, 1]"),
    );
    o.check(
        elapsed < Duration::from_secs(1),
        format!("runtime {elapsed:?} < 1s"),
    );
    o
}

fn toy_medians() -> Outcome {
    let mut o = Outcome::new();
    let a = median(&[1., 2., 3., 4., 6.]).unwrap();
    let b = median(&[3., 4., 2., 7., 9.]).unwrap();
    o.check(a == 3.0, format!("median {{1,2,3,4,6}} = {a}"));
    o.check(b == 4.0, format!("median {{3,4,2,7,9}} = {b}"));
    let d = common::dataset(&[
        vec![1., 3.],
        vec![2., 4.],
        vec![3., 2.],
        vec![4., 7.],
        vec![6., 9.],
    ]);
    let grid = build_grid(&d, Granularity::Halves, Convention::Interp).unwrap();
    let l = assign_label(&[1., 3.], &grid).unwrap();
    o.check(l.to_string() == "H1H1", format!("(1, 3) -> {l}"));
    o
}

fn country_semantics() -> Outcome {
    let mut o = Outcome::new();
    let d = fixture("country").unwrap();
    let c = cluster(&d, Granularity::Halves, Convention::Interp).unwrap();
    o.check(c.len() == 4, format!("{} clusters", c.len()));

    let got: BTreeSet<String> = c
        .clusters()
        .iter()
        .map(|cl| describe_label(&cl.label, c.attribute_names(), c.granularity()))
        .collect();
    let want: BTreeSet<String> = [
        ("bottom", "bottom"),
        ("bottom", "top"),
        ("top", "bottom"),
        ("top", "top"),
    ]
    .iter()
    .map(|(b, r)| format!("birth_rate in {b} half, death_rate in {r} half"))
    .collect();
    o.check(got == want, format!("semantics {got:?}"));

    // (9.1 + 9.2) / 2 is the double nearest 9.15 from below; the reported
    // value is 9.15
    let m = median(&d.column(1)).unwrap();
    o.check(
        fmt_sig(m) == "9.15" && (m - 9.15).abs() <= f64::EPSILON * 16.0,
        format!("death-rate median {m:?}, reported {}", fmt_sig(m)),
    );

    let label = |name: &str| c.observation_labels()[d.find_id(name).unwrap()].to_string();
    let pair = |o: &mut Outcome, a: &str, b: &str| {
        let (la, lb) = (label(a), label(b));
        o.check(la != lb, format!("{a} {la} and {b} {lb} differ"));
    };
    pair(&mut o, "VIETNAM", "PORTUGAL");
    pair(&mut o, "MOROCCO", "CONGO");
    let group: Vec<(String, String)> = ["VENEZUELA", "PANAMA", "JORDAN", "IVORY COAST", "GHANA"]
        .iter()
        .map(|n| (n.to_string(), label(n)))
        .collect();
    let shared = group.iter().all(|(_, l)| *l == group[0].1);
    o.check(
        shared,
        format!("VENEZUELA, PANAMA, JORDAN with IVORY COAST, GHANA in one cluster: {group:?}"),
    );
    o
}

fn country_metrics() -> Outcome {
    let mut o = Outcome::new();
    let d = fixture("country").unwrap();
    let c = cluster(&d, Granularity::Halves, Convention::Interp).unwrap();
    let groups = c.groups();
    let mean = sse(&d, &groups, CenterKind::Mean).unwrap();
    let med = sse(&d, &groups, CenterKind::Median).unwrap();
    let db = davies_bouldin(&d, &groups).unwrap();
    o.check(
        within(mean, 2772.99, 0.01),
        format!(
            "SSE(mean) {} vs 2772.99 ±1% ({})",
            fmt_sig(mean),
            pct(mean, 2772.99)
        ),
    );
    o.check(
        within(med, 3037.54, 0.01),
        format!(
            "SSE(median) {} vs 3037.54 ±1% ({})",
            fmt_sig(med),
            pct(med, 3037.54)
        ),
    );
    o.check(
        within(db, 0.320455, 0.05),
        format!("DB {} vs 0.320455 ±5% ({})", fmt_sig(db), pct(db, 0.320455)),
    );
    let hinges = cluster(&d, Granularity::Halves, Convention::Hinges).unwrap();
    o.note(format!(
        "hinges convention gives the same partition: {}",
        hinges.observation_labels() == c.observation_labels()
    ));
    o
}

fn iris_purity(properties_pass: bool) -> Outcome {
    let mut exact = Outcome::new();
    let d = fixture("iris").unwrap();
    let mut reproduced = false;
    for conv in CONVENTIONS {
        let c = cluster(&d, Granularity::Quartiles, conv).unwrap();
        let p = purity_of(&c, &d).unwrap();
        let empty = match empty_cells(&c, 1 << 16) {
            EmptyCells::Enumerated { empty, .. } => empty.len(),
            EmptyCells::NotEnumerable { .. } => usize::MAX,
        };
        let mut mixed: Vec<(usize, usize)> = p
            .mixed()
            .map(|m| {
                (
                    m.histogram["Iris-versicolor"],
                    m.histogram["Iris-virginica"],
                )
            })
            .collect();
        mixed.sort_unstable();
        let setosa_mixed = p.mixed().any(|m| m.histogram["Iris-setosa"] > 0);
        let mut this = Outcome::new();
        this.check(
            c.len() == 33,
            format!("{conv}: {} non-empty clusters (33)", c.len()),
        );
        this.check(
            p.pure_clusters == 31,
            format!("{conv}: {} pure clusters (31)", p.pure_clusters),
        );
        this.check(
            p.pure_clusters * 33 == 31 * p.total_clusters,
            format!(
                "{conv}: pure-cluster {}% (93.93)",
                fmt_sig(p.pure_cluster_pct)
            ),
        );
        this.check(
            p.pure_population == 131,
            format!(
                "{conv}: pure population {}/150 = {}% (87.33)",
                p.pure_population,
                fmt_sig(p.pure_population_pct)
            ),
        );
        this.check(
            mixed == [(5, 4), (7, 3)] && !setosa_mixed,
            format!(
                "{conv}: mixed (versicolor, virginica) {mixed:?} in {:?} ([(5, 4), (7, 3)])",
                p.mixed().map(|m| m.label.to_string()).collect::<Vec<_>>()
            ),
        );
        this.check(
            empty == 223,
            format!("{conv}: {empty} of 256 cells empty (223)"),
        );
        reproduced |= this.pass;
        exact.details.extend(this.details);
    }

    let mut o = Outcome::new();
    o.check(
        reproduced,
        "a supported convention reproduces the published figures",
    );
    o.details.extend(exact.details);
    if !reproduced {
        // the criterion's own fallback: nearest convention documented and
        // the property suite passing
        o.pass = properties_pass;
        o.note(format!(
            "fallback clause: no convention reproduces; deviations documented in README; property suite {}",
            if properties_pass { "passes" } else { "FAILS" }
        ));
    }
    o
}

fn kmeans_baseline() -> Outcome {
    let mut o = Outcome::new();
    let d = fixture("country").unwrap();
    let mut cfg = KMeansConfig::new(4);
    cfg.restarts = 100;
    let r = kmeans(&d, &cfg).unwrap();
    o.check(
        r.sse <= 2500.0,
        format!(
            "best SSE(mean) {} <= 2500 over 100 restarts",
            fmt_sig(r.sse)
        ),
    );

    let published = [[42.58, 12.70], [24.66, 7.86], [18.13, 12.41], [16.45, 8.09]];
    let mut best = (f64::INFINITY, vec![]);
    for perm in permutations(4) {
        let worst = perm
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..2).map(move |j| (i, p, j)))
            .map(|(i, p, j)| (r.centers[p][j] - published[i][j]).abs())
            .fold(0.0, f64::max);
        if worst < best.0 {
            best = (worst, perm);
        }
    }
    let centers: Vec<String> = best
        .1
        .iter()
        .map(|&p| {
            format!(
                "({}, {})",
                fmt_sig(r.centers[p][0]),
                fmt_sig(r.centers[p][1])
            )
        })
        .collect();
    o.check(
        best.0 <= 0.5,
        format!(
            "centers {centers:?} vs published centers, worst coordinate gap {} (<= 0.5)",
            fmt_sig(best.0)
        ),
    );
    o
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn merge_distance() -> Outcome {
    let mut o = Outcome::new();
    let g = Granularity::Quartiles;
    let a = ClusterLabel::parse("Q1Q2Q3Q2", g).unwrap();
    let b = ClusterLabel::parse("Q2Q2Q1Q4", g).unwrap();
    let dist = label_distance(&a, &b, g).unwrap();
    o.check(
        dist == 5,
        format!("label_distance(Q1Q2Q3Q2, Q2Q2Q1Q4) = {dist}"),
    );
    o
}

const CASES_PER_PROPERTY: u32 = 150;

fn property_suite() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let total = Cell::new(0u32);
    let mut run = |name: &str, f: &mut dyn FnMut(&mut TestRunner) -> Result<(), String>| {
        let mut runner = TestRunner::new_with_rng(
            Config {
                cases: CASES_PER_PROPERTY,
                failure_persistence: None,
                ..Config::default()
            },
            TestRng::deterministic_rng(RngAlgorithm::ChaCha),
        );
        let result = f(&mut runner);
        o.check(
            result.is_ok(),
            format!(
                "{name}{}",
                result.err().map(|e| format!(": {e}")).unwrap_or_default()
            ),
        );
    };
    let count = |t: &Cell<u32>| t.set(t.get() + 1);

    run("partition invariant", &mut |r| {
        r.run(&(rows(), granularity(), convention()), |(x, g, c)| {
            count(&total);
            check_partition(&x, g, c)
        })
        .map_err(|e| e.to_string())
    });
    run("monotone-transform label invariance", &mut |r| {
        r.run(
            &(tied_rows(), granularity(), convention(), -5.0f64..5.0),
            |(x, g, c, s)| {
                count(&total);
                check_monotone(&x, g, c, s)
            },
        )
        .map_err(|e| e.to_string())
    });
    run("marginal balance", &mut |r| {
        r.run(
            &(
                granularity().prop_flat_map(|g| (Just(g), distinct_rows(g))),
                convention(),
            ),
            |((g, x), c)| {
                count(&total);
                check_balance(&x, g, c)
            },
        )
        .map_err(|e| e.to_string())
    });
    run("SSE and DB match brute force (1e-9 rel)", &mut |r| {
        r.run(&(rows(), granularity(), convention()), |(x, g, c)| {
            count(&total);
            check_metrics(&x, g, c)
        })
        .map_err(|e| e.to_string())
    });
    run("Lloyd SSE non-increasing", &mut |r| {
        r.run(
            &(rows(), 1usize..=6, prop::collection::vec(0usize..200, 6)),
            |(x, k, s)| {
                count(&total);
                check_lloyd(&x, k, &s)
            },
        )
        .map_err(|e| e.to_string())
    });
    run(
        "merges are exact unions; merge to current count is identity",
        &mut |r| {
            r.run(
                &(tied_rows(), any::<bool>(), convention(), 1usize..10),
                |(x, h, c, t)| {
                    count(&total);
                    check_merge(&x, h, c, t)
                },
            )
            .map_err(|e| e.to_string())
        },
    );
    run(
        "empty cells and observed cells partition all g^k labels",
        &mut |r| {
            r.run(&(tied_rows(), granularity(), convention()), |(x, g, c)| {
                count(&total);
                check_empty_cells(&x, g, c)
            })
            .map_err(|e| e.to_string())
        },
    );

    let elapsed = start.elapsed();
    let cases = total.get();
    o.check(cases >= 1000, format!("{cases} cases run (>= 1000)"));
    o.check(
        elapsed < Duration::from_secs(60),
        format!("runtime {elapsed:.1?} (< 60s)"),
    );
    o
}

fn main() {
    let mut results: BTreeMap<u32, (&str, Outcome)> = BTreeMap::new();
    results.insert(8, ("property suite", property_suite()));
    let properties_pass = results[&8].1.pass;
    results.insert(1, ("nine-row example golden test", nine_row_golden()));
    results.insert(2, ("toy medians", toy_medians()));
    results.insert(3, ("country semantics", country_semantics()));
    results.insert(4, ("country metrics", country_metrics()));
    results.insert(5, ("Iris purity", iris_purity(properties_pass)));
    results.insert(6, ("K-means baseline", kmeans_baseline()));
    results.insert(7, ("merge distance golden", merge_distance()));

    let mut failed = 0;
    for (id, (name, outcome)) in &results {
        println!(
            "{} criterion {id}: {name}",
            if outcome.pass { "PASS" } else { "FAIL" }
        );
        for d in &outcome.details {
            println!("    {d}");
        }
        failed += usize::from(!outcome.pass);
    }
    println!("\n{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
