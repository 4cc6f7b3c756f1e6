//! Multi-seed benchmark runner, metric aggregation, and table/CSV output.
//!
//! One benchmark runs every configured algorithm `repeats` times on the same
//! scenario; repeat `r` uses run seed `base_seed + r` for every algorithm,
//! so per-seed comparisons are paired. Independent (algorithm, repeat) runs
//! execute in parallel and results are sorted afterwards, so scheduling
//! never changes output bytes. Everything written out is a deterministic
//! function of (scenario, config) except per-run wall-clock times.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::{run_greedy, run_random_search};
use crate::mfi::{run_pecco_mfi, MfiParams};
use crate::mfo::{run_mfo, MfoParams, OptimizeError};
use crate::objective::MetricsReport;
use crate::report::{Algorithm, RunReport};
use crate::topology::all_pairs_optimal_cost;
use crate::workload::{generate_scenario, load_scenario, GeneratorConfig, Scenario, WorkloadError};

/// Where the benchmark scenario comes from.
#[derive(Debug, Clone)]
pub enum ScenarioSource {
    Path(PathBuf),
    Generated { config: GeneratorConfig, seed: u64 },
    Inline(Box<Scenario>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

/// Full benchmark configuration.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub source: ScenarioSource,
    pub algorithms: Vec<Algorithm>,
    pub repeats: usize,
    pub base_seed: u64,
    /// Parameter template for `mfo` and `random`; the per-run seed is
    /// substituted in.
    pub mfo: MfoParams,
    /// Parameter template for `mfi`.
    pub mfi: MfiParams,
}

impl BenchConfig {
    pub fn new(source: ScenarioSource) -> Self {
        Self {
            source,
            algorithms: Algorithm::ALL.to_vec(),
            repeats: 10,
            base_seed: 1,
            mfo: MfoParams::default(),
            mfi: MfiParams::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    InvalidConfig(String),
    #[error("failed to read scenario {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] WorkloadError),
}

/// Aggregated results of one algorithm across all repeats.
#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    /// Successful runs in repeat order.
    pub runs: Vec<RunReport>,
    /// Field-wise arithmetic mean over the raw rows (summed in repeat
    /// order).
    pub mean: MetricsReport,
    /// Field-wise sample standard deviation (0 with a single repeat).
    pub std_dev: MetricsReport,
    /// Ratios recomputed from the mean aggregates, the way the report
    /// tables present them (mean profit over mean cost, and so on).
    pub table_metrics: MetricsReport,
    pub any_overloaded: bool,
    /// (seed, error) of runs that failed; they are excluded from the means.
    pub failures: Vec<(u64, String)>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub scenario_name: String,
    pub repeats: usize,
    pub base_seed: u64,
    pub summaries: Vec<AlgorithmSummary>,
}

pub fn resolve_scenario(source: &ScenarioSource) -> Result<Scenario, BenchError> {
    let scenario = match source {
        ScenarioSource::Path(path) => {
            let bytes = fs::read(path).map_err(|source| BenchError::Io {
                path: path.clone(),
                source,
            })?;
            load_scenario(&bytes)?
        }
        ScenarioSource::Generated { config, seed } => generate_scenario(config, *seed)?,
        ScenarioSource::Inline(scenario) => {
            scenario.validate()?;
            (**scenario).clone()
        }
    };
    Ok(scenario)
}

/// Run the full benchmark. Deterministic end to end given the config,
/// aside from wall-clock measurements.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    if cfg.repeats < 1 {
        return Err(BenchError::InvalidConfig(
            "repeats must be at least 1".to_string(),
        ));
    }
    if cfg.algorithms.is_empty() {
        return Err(BenchError::InvalidConfig(
            "at least one algorithm is required".to_string(),
        ));
    }
    let scenario = resolve_scenario(&cfg.source)?;
    scenario.validate()?;
    let costs = all_pairs_optimal_cost(&scenario.topology);

    let jobs: Vec<(usize, usize)> = (0..cfg.algorithms.len())
        .flat_map(|a| (0..cfg.repeats).map(move |r| (a, r)))
        .collect();
    let mut results: Vec<(usize, usize, Result<RunReport, OptimizeError>)> = jobs
        .par_iter()
        .map(|&(a, r)| {
            let seed = cfg.base_seed + r as u64;
            let outcome = match cfg.algorithms[a] {
                Algorithm::Mfi => {
                    let mut params = cfg.mfi.clone();
                    params.base.seed = seed;
                    run_pecco_mfi(&scenario, &costs, &params)
                }
                Algorithm::Mfo => {
                    let mut params = cfg.mfo.clone();
                    params.seed = seed;
                    run_mfo(&scenario, &costs, &params, None)
                }
                Algorithm::Greedy => {
                    let mut report = run_greedy(&scenario, &costs);
                    report.seed = seed;
                    Ok(report)
                }
                Algorithm::Random => {
                    let mut params = cfg.mfo.clone();
                    params.seed = seed;
                    run_random_search(&scenario, &costs, &params)
                }
            };
            (a, r, outcome)
        })
        .collect();
    results.sort_by_key(|&(a, r, _)| (a, r));

    let mut summaries = Vec::with_capacity(cfg.algorithms.len());
    for (a, &algorithm) in cfg.algorithms.iter().enumerate() {
        let mut runs = Vec::new();
        let mut failures = Vec::new();
        for (_, r, outcome) in results.iter().filter(|&&(ja, _, _)| ja == a) {
            match outcome {
                Ok(report) => runs.push(report.clone()),
                Err(err) => failures.push((cfg.base_seed + *r as u64, err.to_string())),
            }
        }
        summaries.push(summarize(algorithm, runs, failures));
    }

    Ok(BenchReport {
        scenario_name: scenario.name.clone(),
        repeats: cfg.repeats,
        base_seed: cfg.base_seed,
        summaries,
    })
}

fn summarize(
    algorithm: Algorithm,
    runs: Vec<RunReport>,
    failures: Vec<(u64, String)>,
) -> AlgorithmSummary {
    let fields: [fn(&MetricsReport) -> f64; 10] = [
        |m| m.objective,
        |m| m.profit,
        |m| m.cost,
        |m| m.profit_cost_ratio,
        |m| m.allocated_count,
        |m| m.profit_per_allocation,
        |m| m.cost_per_allocation,
        |m| m.utilization_percent,
        |m| m.profit_per_utilization,
        |m| m.cost_per_utilization,
    ];
    let n = runs.len();
    let mut means = [0.0f64; 10];
    let mut stds = [0.0f64; 10];
    if n > 0 {
        for (slot, field) in fields.iter().enumerate() {
            let mut sum = 0.0;
            for run in &runs {
                sum += field(&run.metrics);
            }
            means[slot] = sum / n as f64;
        }
        if n > 1 {
            for (slot, field) in fields.iter().enumerate() {
                let mut sq = 0.0;
                for run in &runs {
                    let d = field(&run.metrics) - means[slot];
                    sq += d * d;
                }
                stds[slot] = (sq / (n - 1) as f64).sqrt();
            }
        }
    }
    let pack = |v: &[f64; 10]| MetricsReport {
        objective: v[0],
        profit: v[1],
        cost: v[2],
        profit_cost_ratio: v[3],
        allocated_count: v[4],
        profit_per_allocation: v[5],
        cost_per_allocation: v[6],
        utilization_percent: v[7],
        profit_per_utilization: v[8],
        cost_per_utilization: v[9],
    };
    let table_metrics =
        MetricsReport::from_aggregates(means[0], means[1], means[2], means[4], means[7]);
    AlgorithmSummary {
        algorithm,
        any_overloaded: runs.iter().any(|run| run.overloaded),
        mean: pack(&means),
        std_dev: pack(&stds),
        table_metrics,
        runs,
        failures,
    }
}

fn fmt2(value: f64) -> String {
    format!("{value:.2}")
}

/// Render the three comparison tables (cost/profit, allocation,
/// utilization), one column per algorithm. Ratio and money cells carry two
/// decimal places; utilization cells of overloaded algorithms are
/// parenthesized; ratios whose denominator was zero are marked with `*`.
pub fn render_tables(report: &BenchReport, format: TableFormat) -> String {
    match format {
        TableFormat::Markdown => render_markdown(report),
        TableFormat::Csv => render_csv(report),
    }
}

struct Cell {
    text: String,
    flagged: bool,
}

fn ratio_cell(ratio: f64, denominator: f64) -> Cell {
    if denominator > 0.0 {
        Cell {
            text: fmt2(ratio),
            flagged: false,
        }
    } else {
        Cell {
            text: "0.00*".to_string(),
            flagged: true,
        }
    }
}

fn render_markdown(report: &BenchReport) -> String {
    let mut out = String::new();
    let names: Vec<&str> = report
        .summaries
        .iter()
        .map(|s| s.algorithm.as_str())
        .collect();
    let mut any_flag = false;

    let mut table = |title: &str, rows: Vec<(&str, Vec<Cell>)>, out: &mut String| {
        let _ = writeln!(out, "### {title}");
        let _ = writeln!(out, "| Metric | {} |", names.join(" | "));
        let _ = writeln!(out, "|---|{}|", vec!["---"; names.len()].join("|"));
        for (label, cells) in rows {
            let rendered: Vec<String> = cells
                .iter()
                .map(|cell| {
                    any_flag |= cell.flagged;
                    cell.text.clone()
                })
                .collect();
            let _ = writeln!(out, "| {label} | {} |", rendered.join(" | "));
        }
        let _ = writeln!(out);
    };

    let plain = |v: f64| Cell {
        text: fmt2(v),
        flagged: false,
    };

    table(
        "Objective, profit and cost",
        vec![
            (
                "Overall Objective",
                report.summaries.iter().map(|s| plain(s.table_metrics.objective)).collect(),
            ),
            (
                "Profit",
                report.summaries.iter().map(|s| plain(s.table_metrics.profit)).collect(),
            ),
            (
                "Cost",
                report.summaries.iter().map(|s| plain(s.table_metrics.cost)).collect(),
            ),
            (
                "Profit/Cost Ratio",
                report
                    .summaries
                    .iter()
                    .map(|s| ratio_cell(s.table_metrics.profit_cost_ratio, s.table_metrics.cost))
                    .collect(),
            ),
        ],
        &mut out,
    );

    table(
        "Task allocation",
        vec![
            (
                "#Allocation",
                report
                    .summaries
                    .iter()
                    .map(|s| plain(s.table_metrics.allocated_count))
                    .collect(),
            ),
            (
                "Profit/Allocation Ratio",
                report
                    .summaries
                    .iter()
                    .map(|s| {
                        ratio_cell(
                            s.table_metrics.profit_per_allocation,
                            s.table_metrics.allocated_count,
                        )
                    })
                    .collect(),
            ),
            (
                "Cost/Allocation Ratio",
                report
                    .summaries
                    .iter()
                    .map(|s| {
                        ratio_cell(
                            s.table_metrics.cost_per_allocation,
                            s.table_metrics.allocated_count,
                        )
                    })
                    .collect(),
            ),
        ],
        &mut out,
    );

    table(
        "Resource utilization",
        vec![
            (
                "Utilization",
                report
                    .summaries
                    .iter()
                    .map(|s| {
                        let text = format!("{}%", fmt2(s.table_metrics.utilization_percent));
                        Cell {
                            text: if s.any_overloaded {
                                format!("({text})")
                            } else {
                                text
                            },
                            flagged: false,
                        }
                    })
                    .collect(),
            ),
            (
                "Profit/Utilization Ratio",
                report
                    .summaries
                    .iter()
                    .map(|s| {
                        ratio_cell(
                            s.table_metrics.profit_per_utilization,
                            s.table_metrics.utilization_percent,
                        )
                    })
                    .collect(),
            ),
            (
                "Cost/Utilization Ratio",
                report
                    .summaries
                    .iter()
                    .map(|s| {
                        ratio_cell(
                            s.table_metrics.cost_per_utilization,
                            s.table_metrics.utilization_percent,
                        )
                    })
                    .collect(),
            ),
        ],
        &mut out,
    );

    if any_flag {
        out.push_str("`*` ratio undefined (zero denominator), reported as 0\n");
    }
    out
}

fn render_csv(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(
        "algorithm,metric_set,objective,profit,cost,profit_cost_ratio,allocation,\
         profit_per_allocation,cost_per_allocation,utilization_pct,profit_per_utilization,\
         cost_per_utilization,overloaded\n",
    );
    for summary in &report.summaries {
        let m = &summary.table_metrics;
        let name = summary.algorithm.as_str();
        let overloaded = summary.any_overloaded;
        let _ = writeln!(
            out,
            "{name},cost_profit,{},{},{},{},,,,,,,{overloaded}",
            fmt2(m.objective),
            fmt2(m.profit),
            fmt2(m.cost),
            fmt2(m.profit_cost_ratio),
        );
        let _ = writeln!(
            out,
            "{name},allocation,,,,,{},{},{},,,,{overloaded}",
            fmt2(m.allocated_count),
            fmt2(m.profit_per_allocation),
            fmt2(m.cost_per_allocation),
        );
        let _ = writeln!(
            out,
            "{name},utilization,,,,,,,,{},{},{},{overloaded}",
            fmt2(m.utilization_percent),
            fmt2(m.profit_per_utilization),
            fmt2(m.cost_per_utilization),
        );
    }
    out
}

/// Raw per-run rows. Every column except `wall_ms` is deterministic.
pub fn render_bench_csv(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(
        "algorithm,repeat,objective,profit,cost,profit_cost_ratio,allocated,profit_per_alloc,\
         cost_per_alloc,utilization_pct,profit_per_util,cost_per_util,overloaded,wall_ms\n",
    );
    for summary in &report.summaries {
        for (repeat, run) in summary.runs.iter().enumerate() {
            let m = &run.metrics;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                summary.algorithm.as_str(),
                repeat,
                m.objective,
                m.profit,
                m.cost,
                m.profit_cost_ratio,
                m.allocated_count,
                m.profit_per_allocation,
                m.cost_per_allocation,
                m.utilization_percent,
                m.profit_per_utilization,
                m.cost_per_utilization,
                run.overloaded,
                run.wall.as_millis(),
            );
        }
    }
    out
}

/// Write `bench.csv`, the rendered tables, and one convergence sidecar per
/// (algorithm, repeat) into `dir`. Returns the paths written.
pub fn write_outputs(
    report: &BenchReport,
    format: TableFormat,
    dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let bench_path = dir.join("bench.csv");
    fs::write(&bench_path, render_bench_csv(report))?;
    written.push(bench_path);

    let tables_name = match format {
        TableFormat::Markdown => "tables.md",
        TableFormat::Csv => "tables.csv",
    };
    let tables_path = dir.join(tables_name);
    fs::write(&tables_path, render_tables(report, format))?;
    written.push(tables_path);

    for summary in &report.summaries {
        for (repeat, run) in summary.runs.iter().enumerate() {
            let mut csv = String::from("iteration,best_objective\n");
            for (iteration, objective) in run.history.iter().enumerate() {
                let _ = writeln!(csv, "{},{}", iteration + 1, objective);
            }
            let path = dir.join(format!(
                "convergence_{}_{repeat}.csv",
                summary.algorithm.as_str()
            ));
            fs::write(&path, csv)?;
            written.push(path);
        }
    }
    Ok(written)
}
