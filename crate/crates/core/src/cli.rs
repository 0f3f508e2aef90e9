//! The `qcluster` command line.
//!
//! Every subcommand prints a plain-text summary to stdout and can write a
//! JSON report (`--report`) echoing its full configuration, and, where it
//! produces an assignment, a CSV of the input rows with the assignment
//! appended (`--output`). Exit codes: 0 success, 1 data or runtime error,
//! 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    empty_cells, outlier_clusters, purity_of, query_labels, EmptyCells, LabelPattern,
    OutlierSelection, DEFAULT_ENUMERATION_LIMIT,
};
use crate::clustering::{cluster, describe_label, Clustering};
use crate::dataset::{fixture, load_csv, ColumnRef, Dataset, Delimiter, LoadOptions};
use crate::error::{Error, Result};
use crate::kmeans::{centers_table, kmeans, KMeansConfig};
use crate::merge::{merge_to_target, MergePlan};
use crate::metrics::MetricsReport;
use crate::quantile::{five_number_summary, Convention, Granularity};
use crate::report::{envelope, fmt_sig, text_table, to_pretty};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "qcluster",
    version,
    about = "Quantile-bin clustering with readable cluster semantics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Label every row by its quantile bins and group rows by label.
    Cluster(ClusterArgs),
    /// SSE and Davies–Bouldin for quantile clusters or a given assignment.
    Metrics(MetricsArgs),
    /// K-means baseline with the same metrics report.
    Kmeans(KmeansArgs),
    /// Outlier clusters, empty cells, label queries and class purity.
    Analyze(AnalyzeArgs),
    /// Five-number summary of every attribute.
    Describe(DescribeArgs),
    /// Coarsen clusters by sibling merges down to a target count.
    Merge(MergeArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Delimited text file to read.
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    pub input: Option<PathBuf>,
    /// Bundled dataset: country or iris.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Attribute columns by name or 0-based index, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[arg(long)]
    pub id_column: Option<String>,
    #[arg(long)]
    pub class_column: Option<String>,
    /// comma, whitespace, tab, semicolon, or a single character.
    #[arg(long, default_value = "comma")]
    pub delimiter: String,
    /// The first line is data, not a header.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// half, quartile or decile.
    #[arg(long, default_value = "quartile")]
    pub granularity: Granularity,
    /// interp or hinges.
    #[arg(long, default_value = "interp")]
    pub convention: Convention,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write a CSV of the rows with their assignment appended.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Merge down to at most this many clusters before writing output.
    #[arg(long)]
    pub merge_to: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Score this assignment CSV (one row per input row, same order)
    /// instead of quantile clusters.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    /// Column holding the cluster id; defaults to `cluster`, then `label`.
    #[arg(long)]
    pub assignment_column: Option<String>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct KmeansArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    /// Stop when at most this fraction of rows changes cluster.
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
    /// Z-score attributes before clustering (metrics stay on raw values).
    #[arg(long)]
    pub normalize: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Report this many smallest clusters.
    #[arg(long, default_value_t = 5, conflicts_with = "max_population")]
    pub outliers: usize,
    /// Report every cluster with at most this many rows instead.
    #[arg(long)]
    pub max_population: Option<usize>,
    /// Label pattern, e.g. "!Q4,Q4,Q4,Q4,Q4".
    #[arg(long, allow_hyphen_values = true)]
    pub pattern: Option<String>,
    /// Enumerate empty cells only when g^k is at most this.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub empty_limit: u128,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DescribeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "interp")]
    pub convention: Convention,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MergeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub merge_to: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_delimiter(s: &str) -> Result<Delimiter> {
    Ok(match s {
        "comma" | "," => Delimiter::Comma,
        "whitespace" | "space" | " " => Delimiter::Whitespace,
        "tab" | "\t" => Delimiter::Byte(b'\t'),
        "semicolon" | ";" => Delimiter::Byte(b';'),
        other if other.len() == 1 && other.is_ascii() => Delimiter::Byte(other.as_bytes()[0]),
        other => return Err(Error::InvalidConfig(format!("unknown delimiter {other:?}"))),
    })
}

fn column_refs(cols: &[String]) -> Vec<ColumnRef> {
    cols.iter()
        .map(|c| c.parse().expect("infallible"))
        .collect()
}

pub fn load_input(args: &InputArgs) -> Result<Dataset> {
    match (&args.input, &args.fixture) {
        (_, Some(name)) => {
            let ds = fixture(name)?;
            if args.columns.is_empty() {
                Ok(ds)
            } else {
                ds.select(&column_refs(&args.columns))
            }
        }
        (Some(path), None) => {
            let opts = LoadOptions {
                delimiter: parse_delimiter(&args.delimiter)?,
                has_header: !args.no_header,
                id_column: args
                    .id_column
                    .as_deref()
                    .map(|c| c.parse().expect("infallible")),
                class_column: args
                    .class_column
                    .as_deref()
                    .map(|c| c.parse().expect("infallible")),
                attribute_columns: column_refs(&args.columns),
            };
            load_csv(path, &opts)
        }
        (None, None) => Err(Error::InvalidConfig(
            "one of --input or --fixture is required".into(),
        )),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_report(
    path: Option<&PathBuf>,
    command: &str,
    config: &impl Serialize,
    body: &impl Serialize,
) -> Result<()> {
    if let Some(path) = path {
        write_file(path, &to_pretty(&envelope(command, config, body)?)?)?;
    }
    Ok(())
}

/// Input rows with extra string columns appended.
fn assignment_csv(data: &Dataset, extra_header: &[&str], extra: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let mut header = vec![];
    if data.ids().is_some() {
        header.push("id".to_string());
    }
    header.extend(data.attribute_names().iter().cloned());
    if data.classes().is_some() {
        header.push("class".to_string());
    }
    header.extend(extra_header.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for i in 0..data.len() {
        let mut rec = vec![];
        if let Some(ids) = data.ids() {
            rec.push(ids[i].clone());
        }
        rec.extend(data.row(i).iter().map(|v| format!("{v}")));
        if let Some(cls) = data.classes() {
            rec.push(cls[i].clone());
        }
        rec.extend(extra[i].iter().cloned());
        w.write_record(&rec)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn clustering_csv(data: &Dataset, c: &Clustering) -> Result<String> {
    let mut extra = vec![vec![]; data.len()];
    for cl in c.clusters() {
        let sem = describe_label(&cl.label, c.attribute_names(), c.granularity());
        for &m in &cl.members {
            extra[m] = vec![cl.label.to_string(), sem.clone()];
        }
    }
    assignment_csv(data, &["label", "semantics"], &extra)
}

#[derive(Serialize)]
struct ClusterSummary {
    label: String,
    digits: Option<String>,
    population: usize,
    semantics: String,
}

fn cluster_summaries(c: &Clustering) -> Vec<ClusterSummary> {
    c.clusters()
        .iter()
        .map(|cl| ClusterSummary {
            label: cl.label.to_string(),
            digits: cl.label.digits(c.granularity()),
            population: cl.population(),
            semantics: describe_label(&cl.label, c.attribute_names(), c.granularity()),
        })
        .collect()
}

fn grid_json(c: &Clustering) -> serde_json::Value {
    let g = c.grid();
    json!({
        "granularity": g.granularity(),
        "convention": g.convention(),
        "boundaries": c.attribute_names().iter().enumerate()
            .map(|(j, name)| json!({"attribute": name, "boundaries": g.boundaries(j)}))
            .collect::<Vec<_>>(),
    })
}

fn cluster_text(c: &Clustering) -> String {
    let rows: Vec<Vec<String>> = cluster_summaries(c)
        .into_iter()
        .map(|s| vec![s.label, s.population.to_string(), s.semantics])
        .collect();
    format!(
        "{} clusters over {} rows\n{}",
        c.len(),
        c.n(),
        text_table(
            &["label".into(), "population".into(), "semantics".into()],
            &rows
        )
    )
}

fn steps_text(plan: &MergePlan) -> String {
    let mut s = String::new();
    for (i, st) in plan.steps.iter().enumerate() {
        s.push_str(&format!(
            "step {}: {} + {} -> {} (label distance {}{})\n",
            i + 1,
            st.a,
            st.b,
            st.merged,
            st.label_distance,
            st.tie_break_distance
                .map(|d| format!(", center distance {}", fmt_sig(d)))
                .unwrap_or_default()
        ));
    }
    s
}

fn run_cluster(args: &ClusterArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_input(&args.input)?;
    let mut c = cluster(&data, args.grid.granularity, args.grid.convention)?;
    let mut plan = None;
    if let Some(target) = args.merge_to {
        let p = merge_to_target(&c, &data, target)?;
        c = p.clustering.clone();
        plan = Some(p);
    }
    if let Some(path) = &args.out.output {
        write_file(path, &clustering_csv(&data, &c)?)?;
    }
    let body = json!({
        "n": c.n(),
        "grid": grid_json(&c),
        "cluster_count": c.len(),
        "labels": c.clusters().iter().map(|cl| cl.label.to_string()).collect::<Vec<_>>(),
        "clusters": cluster_summaries(&c),
        "merge": plan,
    });
    write_report(args.out.report.as_ref(), "cluster", args, &body)?;
    if let Some(p) = &plan {
        write!(out, "{}", steps_text(p)).map_err(io_err)?;
    }
    write!(out, "{}", cluster_text(&c)).map_err(io_err)?;
    Ok(())
}

fn io_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Reads one label per row from an assignment CSV and groups row indices by
/// label, in label order.
fn read_assignment(
    path: &Path,
    column: Option<&str>,
    n: usize,
) -> Result<(Vec<Vec<usize>>, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let col = match column {
        Some(name) => header.iter().position(|h| h == name),
        None => header
            .iter()
            .position(|h| h == "cluster")
            .or_else(|| header.iter().position(|h| h == "label")),
    }
    .ok_or_else(|| Error::MissingColumn(column.unwrap_or("cluster").to_string()))?;
    let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let label = rec.get(col).ok_or(Error::RaggedRow {
            row: i,
            expected: header.len(),
            found: rec.len(),
        })?;
        by_label.entry(label.to_string()).or_default().push(i);
        rows += 1;
    }
    if rows != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: rows,
        });
    }
    Ok((
        by_label.values().cloned().collect(),
        by_label.into_keys().collect(),
    ))
}

fn metrics_text(r: &MetricsReport) -> String {
    let rows: Vec<Vec<String>> = r
        .clusters
        .iter()
        .map(|c| {
            vec![
                c.label.clone(),
                c.population.to_string(),
                fmt_sig(c.sse_mean),
                fmt_sig(c.sse_median),
                fmt_sig(c.spread),
            ]
        })
        .collect();
    format!(
        "clusters: {}\nSSE(mean): {}\nSSE(median): {}\nDavies-Bouldin: {}\n{}",
        r.cluster_count,
        fmt_sig(r.sse_mean),
        fmt_sig(r.sse_median),
        fmt_sig(r.davies_bouldin),
        text_table(
            &["cluster", "population", "sse_mean", "sse_median", "spread"].map(String::from),
            &rows
        )
    )
}

fn run_metrics(args: &MetricsArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_input(&args.input)?;
    let (groups, labels) = match &args.assignment {
        Some(path) => read_assignment(path, args.assignment_column.as_deref(), data.len())?,
        None => {
            let c = cluster(&data, args.grid.granularity, args.grid.convention)?;
            (
                c.groups(),
                c.clusters().iter().map(|cl| cl.label.to_string()).collect(),
            )
        }
    };
    let report = MetricsReport::compute(&data, &groups, &labels)?;
    write_report(args.report.as_ref(), "metrics", args, &report)?;
    write!(out, "{}", metrics_text(&report)).map_err(io_err)?;
    Ok(())
}

fn run_kmeans(args: &KmeansArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_input(&args.input)?;
    let fit_on = if args.normalize {
        data.standardized()?
    } else {
        data.clone()
    };
    let cfg = KMeansConfig {
        k: args.k,
        max_iterations: args.max_iterations,
        restarts: args.restarts,
        seed: args.seed,
        tolerance: args.tolerance,
    };
    let mut result = kmeans(&fit_on, &cfg)?;
    let groups = result.groups();
    // centers and metrics on the raw attribute scale
    result.centers = groups
        .iter()
        .map(|g| crate::metrics::mean_center(&g.iter().map(|&i| data.row(i)).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let labels: Vec<String> = (1..=cfg.k).map(|c| c.to_string()).collect();
    let metrics = if cfg.k >= 2 {
        Some(MetricsReport::compute(&data, &groups, &labels)?)
    } else {
        None
    };
    let table = centers_table(&result, data.attribute_names());

    if let Some(path) = &args.out.output {
        let extra: Vec<Vec<String>> = result
            .assignment
            .iter()
            .map(|&c| vec![(c + 1).to_string()])
            .collect();
        write_file(path, &assignment_csv(&data, &["cluster"], &extra)?)?;
    }
    let body = json!({
        "restart": result.restart,
        "iterations": result.iterations,
        "converged": result.converged,
        "sse": result.sse,
        "centers": table,
        "metrics": metrics,
    });
    write_report(args.out.report.as_ref(), "kmeans", args, &body)?;

    let mut header = vec!["attribute".to_string()];
    header.extend(labels.iter().map(|l| format!("cluster {l}")));
    let mut rows: Vec<Vec<String>> = table
        .attributes
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let mut r = vec![a.clone()];
            r.extend(table.centers.iter().map(|c| fmt_sig(c[j])));
            r
        })
        .collect();
    let mut pop = vec!["population".to_string()];
    pop.extend(table.populations.iter().map(|p| p.to_string()));
    rows.push(pop);
    write!(
        out,
        "best of {} restarts: restart {}, {} iterations\n{}",
        cfg.restarts,
        result.restart,
        result.iterations,
        text_table(&header, &rows)
    )
    .map_err(io_err)?;
    match &metrics {
        Some(m) => write!(out, "{}", metrics_text(m)).map_err(io_err)?,
        None => writeln!(out, "SSE(mean): {}", fmt_sig(result.sse)).map_err(io_err)?,
    }
    Ok(())
}

fn run_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_input(&args.input)?;
    let c = cluster(&data, args.grid.granularity, args.grid.convention)?;
    let selection = match args.max_population {
        Some(t) => OutlierSelection::MaxPopulation(t),
        None => OutlierSelection::Smallest(args.outliers),
    };
    let outliers = outlier_clusters(&c, &data, selection)?;
    let empty = empty_cells(&c, args.empty_limit);
    let pattern = args
        .pattern
        .as_deref()
        .map(|p| -> Result<_> {
            let parsed: LabelPattern = p.parse()?;
            let hits = query_labels(&c, &parsed)?;
            Ok(json!({
                "pattern": parsed.to_string(),
                "matches": hits.iter().map(|cl| json!({
                    "label": cl.label,
                    "population": cl.population(),
                    "semantics": describe_label(&cl.label, c.attribute_names(), c.granularity()),
                })).collect::<Vec<_>>(),
            }))
        })
        .transpose()?;
    let purity = match data.classes() {
        Some(_) => Some(purity_of(&c, &data)?),
        None => None,
    };
    let body = json!({
        "cluster_count": c.len(),
        "outliers": outliers,
        "empty_cells": empty,
        "query": pattern,
        "purity": purity,
    });
    write_report(args.report.as_ref(), "analyze", args, &body)?;

    let mut s = format!(
        "{} clusters over {} rows\n\nsmallest clusters:\n",
        c.len(),
        c.n()
    );
    let rows: Vec<Vec<String>> = outliers
        .clusters
        .iter()
        .map(|e| {
            vec![
                e.label.to_string(),
                e.population.to_string(),
                e.semantics.clone(),
            ]
        })
        .collect();
    s.push_str(&text_table(
        &["label", "population", "semantics"].map(String::from),
        &rows,
    ));
    match &empty {
        EmptyCells::Enumerated {
            possible,
            observed,
            empty,
        } => {
            s.push_str(&format!(
                "\nempty cells: {} of {possible} ({observed} observed)\n",
                empty.len()
            ));
            for l in empty {
                s.push_str(&format!("  {l}\n"));
            }
        }
        EmptyCells::NotEnumerable { possible, observed } => {
            let p = possible.map_or("more than 2^128".to_string(), |p| p.to_string());
            s.push_str(&format!(
                "\nempty cells: not enumerated ({p} possible, {observed} observed)\n"
            ));
        }
    }
    if let Some(q) = &pattern {
        s.push_str(&format!(
            "\nclusters matching {}:\n",
            q["pattern"].as_str().unwrap_or_default()
        ));
        for m in q["matches"].as_array().into_iter().flatten() {
            s.push_str(&format!(
                "  {} ({}): {}\n",
                m["label"].as_str().unwrap_or_default(),
                m["population"],
                m["semantics"].as_str().unwrap_or_default()
            ));
        }
    }
    if let Some(p) = &purity {
        s.push_str(&format!(
            "\npure clusters: {}/{} = {}%\npure population: {}/{} = {}%\n",
            p.pure_clusters,
            p.total_clusters,
            fmt_sig(p.pure_cluster_pct),
            p.pure_population,
            p.n,
            fmt_sig(p.pure_population_pct)
        ));
        let mut header = vec!["mixed cluster".to_string()];
        header.extend(p.classes.iter().cloned());
        let rows: Vec<Vec<String>> = p
            .mixed()
            .map(|m| {
                let mut r = vec![m.label.to_string()];
                r.extend(m.histogram.values().map(|v| v.to_string()));
                r
            })
            .collect();
        s.push_str(&text_table(&header, &rows));
    }
    write!(out, "{s}").map_err(io_err)?;
    Ok(())
}

fn run_describe(args: &DescribeArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_input(&args.input)?;
    let mut summaries = vec![];
    for (j, name) in data.attribute_names().iter().enumerate() {
        let s = five_number_summary(&data.column(j), args.convention)?;
        summaries.push((name.clone(), s));
    }
    let body = json!({
        "n": data.len(),
        "attributes": summaries.iter().map(|(name, s)| json!({
            "attribute": name, "min": s.min, "q1": s.q1, "median": s.median, "q3": s.q3, "max": s.max,
        })).collect::<Vec<_>>(),
    });
    write_report(args.report.as_ref(), "describe", args, &body)?;
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|(name, s)| {
            let mut r = vec![name.clone()];
            r.extend([s.min, s.q1, s.median, s.q3, s.max].map(fmt_sig));
            r
        })
        .collect();
    write!(
        out,
        "{}",
        text_table(
            &["attribute", "min", "q1", "median", "q3", "max"].map(String::from),
            &rows
        )
    )
    .map_err(io_err)?;
    Ok(())
}

fn run_merge(args: &MergeArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_input(&args.input)?;
    let c = cluster(&data, args.grid.granularity, args.grid.convention)?;
    let plan = merge_to_target(&c, &data, args.merge_to)?;
    if let Some(path) = &args.out.output {
        write_file(path, &clustering_csv(&data, &plan.clustering)?)?;
    }
    let body = json!({
        "plan": plan,
        "final_cluster_count": plan.clustering.len(),
        "clusters": cluster_summaries(&plan.clustering),
    });
    write_report(args.out.report.as_ref(), "merge", args, &body)?;
    write!(
        out,
        "{} -> {} clusters\n{}{}",
        plan.initial_clusters,
        plan.clustering.len(),
        steps_text(&plan),
        cluster_text(&plan.clustering)
    )
    .map_err(io_err)?;
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Cluster(a) => run_cluster(a, out),
        Command::Metrics(a) => run_metrics(a, out),
        Command::Kmeans(a) => run_kmeans(a, out),
        Command::Analyze(a) => run_analyze(a, out),
        Command::Describe(a) => run_describe(a, out),
        Command::Merge(a) => run_merge(a, out),
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}
