//! Benchmark matrices over scenarios, models and alphas.
//!
//! [`run_bench`] plans every (pair, alpha, model) cell, times it, and
//! averages per model. Reports come out as CSV, as aligned text tables, or
//! as a whitespace-separated data block for plotting tools.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{plan_route, Model, RouteOutcome, RouteRequest};
use crate::risk::PatientProfile;
use crate::scenario::{Scenario, ScenarioRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodePair {
    pub src: String,
    pub dest: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPairs {
    pub count: usize,
    pub seed: u64,
}

fn default_alphas() -> Vec<f64> {
    vec![crate::planner::DEFAULT_ALPHA]
}

fn default_models() -> Vec<Model> {
    Model::ALL.to_vec()
}

fn default_repetitions() -> usize {
    5
}

fn default_profile() -> PatientProfile {
    PatientProfile::baseline()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    /// Scenario file paths; resolved by the caller.
    #[serde(default)]
    pub scenarios: Vec<String>,
    #[serde(default)]
    pub pairs: Vec<NodePair>,
    #[serde(default)]
    pub random_pairs: Option<RandomPairs>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_models")]
    pub models: Vec<Model>,
    /// Timed runs per cell, after one untimed warm-up.
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_profile")]
    pub profile: PatientProfile,
    #[serde(default)]
    pub depart_t: f64,
}

impl BenchSpec {
    pub fn with_pairs(pairs: Vec<NodePair>) -> Self {
        Self {
            scenarios: Vec::new(),
            pairs,
            random_pairs: None,
            alphas: default_alphas(),
            models: default_models(),
            repetitions: default_repetitions(),
            profile: default_profile(),
            depart_t: 0.0,
        }
    }

    pub fn with_random_pairs(count: usize, seed: u64) -> Self {
        Self { random_pairs: Some(RandomPairs { count, seed }), ..Self::with_pairs(Vec::new()) }
    }
}

/// One successful cell. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub src: String,
    pub dest: String,
    pub model: Model,
    pub edges_count: usize,
    pub distance_m: f64,
    pub travel_time_s: f64,
    pub total_cost: f64,
    pub mean_exposure: f64,
    pub nodes_expanded: usize,
    /// Median over the timed repetitions.
    pub wall_clock_us: u64,
    pub scenario: String,
    pub alpha: f64,
}

/// A cell that produced no route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchFailure {
    pub scenario: String,
    pub src: String,
    pub dest: String,
    pub model: Model,
    pub alpha: f64,
    pub reason: String,
}

/// Per-model means over successful rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelAggregate {
    pub model: Model,
    pub runs: usize,
    pub distance_m: f64,
    pub travel_time_s: f64,
    pub edges: f64,
    pub mean_exposure: f64,
    pub nodes_expanded: f64,
    pub wall_clock_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub failures: Vec<BenchFailure>,
    pub aggregates: Vec<ModelAggregate>,
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("empty request matrix")]
    EmptyMatrix,
    #[error("no scenarios to run")]
    NoScenarios,
    #[error("repetitions must be >= 1")]
    NoRepetitions,
    #[error("alpha sweep is empty")]
    NoAlphas,
    #[error("alpha must be finite and >= 0, got {0}")]
    InvalidAlpha(f64),
    #[error("model list is empty")]
    NoModels,
    #[error("random pairs need a scenario with at least two nodes ({0:?} has fewer)")]
    TooFewNodes(String),
    #[error("report needs at least one row")]
    NoRows,
    #[error("report has rows but no aggregates")]
    MissingAggregates,
}

fn check_spec(spec: &BenchSpec, scenarios: &[Scenario]) -> Result<(), BenchError> {
    let random = spec.random_pairs.map_or(0, |r| r.count);
    if spec.pairs.is_empty() && random == 0 {
        return Err(BenchError::EmptyMatrix);
    }
    if scenarios.is_empty() {
        return Err(BenchError::NoScenarios);
    }
    if spec.repetitions == 0 {
        return Err(BenchError::NoRepetitions);
    }
    if spec.alphas.is_empty() {
        return Err(BenchError::NoAlphas);
    }
    if let Some(&a) = spec.alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(BenchError::InvalidAlpha(a));
    }
    if spec.models.is_empty() {
        return Err(BenchError::NoModels);
    }
    Ok(())
}

/// Explicit pairs followed by seeded random ones (distinct endpoints).
pub fn request_pairs(spec: &BenchSpec, scenario: &Scenario) -> Result<Vec<NodePair>, BenchError> {
    let mut pairs = spec.pairs.clone();
    if let Some(RandomPairs { count, seed }) = spec.random_pairs {
        let nodes = scenario.graph().nodes();
        if count > 0 && nodes.len() < 2 {
            return Err(BenchError::TooFewNodes(scenario.name().to_owned()));
        }
        let mut rng = ScenarioRng::new(seed);
        let n = nodes.len() as u64;
        for _ in 0..count {
            let src = rng.below(n);
            let dest = (src + 1 + rng.below(n - 1)) % n;
            pairs.push(NodePair { src: nodes[src as usize].id.clone(), dest: nodes[dest as usize].id.clone() });
        }
    }
    Ok(pairs)
}

enum Cell {
    Row(BenchRow),
    Failure(BenchFailure),
}

fn run_cell(spec: &BenchSpec, scenario: &Scenario, pair: &NodePair, alpha: f64, model: Model) -> Cell {
    let request = model.apply(&RouteRequest {
        depart_t: spec.depart_t,
        alpha,
        ..RouteRequest::new(pair.src.clone(), pair.dest.clone(), spec.profile)
    });
    let failure = |reason: String| {
        Cell::Failure(BenchFailure {
            scenario: scenario.name().to_owned(),
            src: pair.src.clone(),
            dest: pair.dest.clone(),
            model,
            alpha,
            reason,
        })
    };

    let first = match plan_route(&request, scenario) {
        Ok(RouteOutcome::Found(r)) => r,
        Ok(RouteOutcome::NoRoute(_)) => return failure("no route".into()),
        Err(e) => return failure(e.to_string()),
    };
    let mut samples: Vec<u64> = (0..spec.repetitions)
        .map(|_| {
            let start = Instant::now();
            let out = plan_route(&request, scenario);
            let us = start.elapsed().as_micros() as u64;
            debug_assert!(out.is_ok());
            us
        })
        .collect();
    samples.sort_unstable();

    Cell::Row(BenchRow {
        src: pair.src.clone(),
        dest: pair.dest.clone(),
        model,
        edges_count: first.edges_count,
        distance_m: first.total_distance_m,
        travel_time_s: first.travel_time_s,
        total_cost: first.total_cost,
        mean_exposure: first.mean_exposure(),
        nodes_expanded: first.nodes_expanded,
        wall_clock_us: samples[samples.len() / 2],
        scenario: scenario.name().to_owned(),
        alpha,
    })
}

/// Runs the full matrix. Cells run in parallel across pairs; row order is
/// scenario, pair, alpha, model regardless of scheduling.
pub fn run_bench(spec: &BenchSpec, scenarios: &[Scenario]) -> Result<BenchReport, BenchError> {
    check_spec(spec, scenarios)?;
    let mut jobs = Vec::new();
    for scenario in scenarios {
        for pair in request_pairs(spec, scenario)? {
            jobs.push((scenario, pair));
        }
    }

    let cells: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|(scenario, pair)| {
            let mut out = Vec::with_capacity(spec.alphas.len() * spec.models.len());
            for &alpha in &spec.alphas {
                for &model in &spec.models {
                    out.push(run_cell(spec, scenario, pair, alpha, model));
                }
            }
            out
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for cell in cells.into_iter().flatten() {
        match cell {
            Cell::Row(r) => rows.push(r),
            Cell::Failure(f) => failures.push(f),
        }
    }
    let aggregates = aggregate(&rows, &spec.models);
    Ok(BenchReport { rows, failures, aggregates })
}

/// Per-model means of `rows`, in the order of `models` (models without rows
/// are skipped).
pub fn aggregate(rows: &[BenchRow], models: &[Model]) -> Vec<ModelAggregate> {
    let mut by_model: BTreeMap<Model, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        by_model.entry(r.model).or_default().push(r);
    }
    let mut seen = Vec::new();
    models
        .iter()
        .filter(|m| {
            let fresh = !seen.contains(*m);
            seen.push(**m);
            fresh
        })
        .filter_map(|m| {
            let rs = by_model.get(m)?;
            let n = rs.len() as f64;
            let mean = |f: &dyn Fn(&BenchRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            Some(ModelAggregate {
                model: *m,
                runs: rs.len(),
                distance_m: mean(&|r| r.distance_m),
                travel_time_s: mean(&|r| r.travel_time_s),
                edges: mean(&|r| r.edges_count as f64),
                mean_exposure: mean(&|r| r.mean_exposure),
                nodes_expanded: mean(&|r| r.nodes_expanded as f64),
                wall_clock_us: mean(&|r| r.wall_clock_us as f64),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Table,
    /// Whitespace-separated per-model means with a `#` header line.
    Gnuplot,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            "gnuplot" => Ok(ReportFormat::Gnuplot),
            _ => Err(format!("unknown report format {s:?} (expected csv, table or gnuplot)")),
        }
    }
}

pub const CSV_COLUMNS: [&str; 12] = [
    "src",
    "dest",
    "model",
    "edges_count",
    "distance_m",
    "travel_time_s",
    "total_cost",
    "mean_exposure",
    "nodes_expanded",
    "wall_clock_us",
    "scenario",
    "alpha",
];

pub fn emit_report(report: &BenchReport, format: ReportFormat) -> Result<String, BenchError> {
    if report.rows.is_empty() {
        return Err(BenchError::NoRows);
    }
    if report.aggregates.is_empty() {
        return Err(BenchError::MissingAggregates);
    }
    Ok(match format {
        ReportFormat::Csv => to_csv(&report.rows),
        ReportFormat::Table => to_table(report),
        ReportFormat::Gnuplot => to_gnuplot(&report.aggregates),
    })
}

fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("bench row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is UTF-8")
}

fn render(out: &mut String, title: &str, header: &[&str], body: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_owned()
    };
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{}", line(&mut header.iter().copied()));
    let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    for row in body {
        let _ = writeln!(out, "{}", line(&mut row.iter().map(String::as_str)));
    }
}

fn to_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.scenario.clone(),
                r.src.clone(),
                r.dest.clone(),
                r.model.label().to_owned(),
                format!("{}", r.alpha),
                r.edges_count.to_string(),
                format!("{:.2}", r.distance_m),
                format!("{:.2}", r.travel_time_s),
                format!("{:.2}", r.total_cost),
                format!("{:.4}", r.mean_exposure),
                r.nodes_expanded.to_string(),
                r.wall_clock_us.to_string(),
            ]
        })
        .collect();
    render(
        &mut out,
        "Search Results",
        &[
            "Scenario",
            "Src",
            "Dest",
            "Model",
            "Alpha",
            "Edges Count",
            "Dist (m)",
            "Time (s)",
            "Total Cost",
            "Mean Exposure",
            "Nodes Expanded",
            "Wall Clock (us)",
        ],
        &rows,
    );
    out.push('\n');
    let aggs: Vec<Vec<String>> = report
        .aggregates
        .iter()
        .map(|a| {
            vec![
                a.model.label().to_owned(),
                format!("{:.2}", a.distance_m),
                format!("{:.2}", a.travel_time_s),
                format!("{:.2}", a.edges),
                format!("{:.4}", a.mean_exposure),
                format!("{:.1}", a.nodes_expanded),
                format!("{:.1}", a.wall_clock_us),
                a.runs.to_string(),
            ]
        })
        .collect();
    render(
        &mut out,
        "Average Results by Search Type",
        &["Model", "Distance (m)", "Time (s)", "Edges", "Mean Exposure", "Nodes Expanded", "Wall Clock (us)", "Runs"],
        &aggs,
    );
    if !report.failures.is_empty() {
        out.push('\n');
        let fails: Vec<Vec<String>> = report
            .failures
            .iter()
            .map(|f| {
                vec![
                    f.scenario.clone(),
                    f.src.clone(),
                    f.dest.clone(),
                    f.model.label().to_owned(),
                    f.alpha.to_string(),
                    f.reason.clone(),
                ]
            })
            .collect();
        render(&mut out, "Failures", &["Scenario", "Src", "Dest", "Model", "Alpha", "Reason"], &fails);
    }
    out
}

fn to_gnuplot(aggregates: &[ModelAggregate]) -> String {
    let mut out =
        String::from("# index model distance_m travel_time_s edges mean_exposure nodes_expanded wall_clock_us\n");
    for (i, a) in aggregates.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i} \"{}\" {} {} {} {} {} {}",
            a.model.label(),
            a.distance_m,
            a.travel_time_s,
            a.edges,
            a.mean_exposure,
            a.nodes_expanded,
            a.wall_clock_us
        );
    }
    out
}
