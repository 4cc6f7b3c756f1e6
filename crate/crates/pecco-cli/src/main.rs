//! `pecco` — generate offloading scenarios, run a single optimizer, run the
//! full benchmark comparison, or brute-force tiny instances.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pecco::baselines::{run_greedy, run_random_search};
use pecco::bench::{
    render_tables, run_benchmark, write_outputs, BenchConfig, ScenarioSource, TableFormat,
};
use pecco::exhaustive::exhaustive_optimum;
use pecco::mfi::{run_pecco_mfi, MfiParams};
use pecco::mfo::{run_mfo, MfoParams};
use pecco::report::{Algorithm, RunReport};
use pecco::topology::all_pairs_optimal_cost;
use pecco::workload::{generate_scenario, load_scenario, save_scenario, GeneratorConfig, Scenario};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Markdown,
    Csv,
}

impl From<OutputFormat> for TableFormat {
    fn from(format: OutputFormat) -> Self {
        match format {
            OutputFormat::Markdown => TableFormat::Markdown,
            OutputFormat::Csv => TableFormat::Csv,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "pecco", version, about = "Edge-cloud computation offloading workbench")]
struct Cli {
    /// Scenario file to operate on; omitted: a default synthetic scenario
    /// is generated from --seed.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Generation seed / base run seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Benchmark repeats (run seeds are seed, seed+1, ...).
    #[arg(long, global = true, default_value_t = 10)]
    repeats: usize,

    /// Comma-separated algorithms: mfi, mfo, greedy, random.
    #[arg(long, global = true, default_value = "mfi,mfo,greedy,random")]
    algorithms: String,

    /// Number of search candidates (moths).
    #[arg(long, global = true, default_value_t = 30)]
    moths: usize,

    /// Number of iterations.
    #[arg(long, global = true, default_value_t = 100)]
    iters: usize,

    /// Override the scenario's profit ratio (must be negative).
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<f64>,

    /// Position upper bound.
    #[arg(long, global = true, default_value_t = 1.0)]
    ub: f64,

    /// Spiral shape parameter.
    #[arg(long, global = true, default_value_t = 1.0)]
    b: f64,

    /// Lifetime threshold of the improved optimizer.
    #[arg(long = "tau-threshold", global = true, default_value_t = 0.8)]
    tau_threshold: f64,

    /// Keep the best flames across iterations.
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    elitism: bool,

    /// Table output format for bench.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Markdown)]
    format: OutputFormat,

    /// Output path: scenario file for generate, directory for bench.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic scenario file.
    Generate {
        #[arg(long, default_value_t = 20)]
        n_cloud: usize,
        #[arg(long, default_value_t = 30)]
        n_edge: usize,
        #[arg(long, default_value_t = 200)]
        n_tasks: usize,
        #[arg(long, default_value_t = 0.15)]
        link_density: f64,
    },
    /// Run one algorithm and print its breakdown and metrics.
    Run {
        /// mfi, mfo, greedy, or random.
        algorithm: String,
    },
    /// Run the benchmark comparison and write tables plus CSV outputs.
    Bench,
    /// Brute-force the best decodable outcome of a tiny scenario; prints
    /// JSON.
    Oracle,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { .. } => generate(&cli),
        Command::Run { .. } => run_single(&cli),
        Command::Bench => bench(&cli),
        Command::Oracle => oracle(&cli),
    }
}

fn mfo_params(cli: &Cli) -> MfoParams {
    MfoParams {
        nsa: cli.moths,
        max_iter: cli.iters,
        b: cli.b,
        ub: cli.ub,
        elitism: cli.elitism,
        seed: cli.seed,
    }
}

fn mfi_params(cli: &Cli) -> MfiParams {
    MfiParams {
        base: mfo_params(cli),
        lifetime_threshold: cli.tau_threshold,
    }
}

fn load_or_generate(cli: &Cli) -> Result<Scenario> {
    let mut scenario = match &cli.scenario {
        Some(path) => {
            let bytes =
                fs::read(path).with_context(|| format!("reading scenario {}", path.display()))?;
            load_scenario(&bytes)?
        }
        None => generate_scenario(&GeneratorConfig::default(), cli.seed)?,
    };
    if let Some(lambda) = cli.lambda {
        scenario.lambda = lambda;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn generate(cli: &Cli) -> Result<()> {
    let Command::Generate {
        n_cloud,
        n_edge,
        n_tasks,
        link_density,
    } = &cli.command
    else {
        unreachable!()
    };
    let cfg = GeneratorConfig {
        n_cloud: *n_cloud,
        n_edge: *n_edge,
        n_tasks: *n_tasks,
        link_density: *link_density,
        lambda: cli.lambda.unwrap_or(GeneratorConfig::default().lambda),
        ..GeneratorConfig::default()
    };
    let scenario = generate_scenario(&cfg, cli.seed)?;
    let path = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("scenario.json"));
    fs::write(&path, save_scenario(&scenario))
        .with_context(|| format!("writing {}", path.display()))?;
    println!(
        "wrote {} ({} nodes, {} links, {} tasks, lambda {})",
        path.display(),
        scenario.topology.nodes.len(),
        scenario.topology.links.len(),
        scenario.tasks.len(),
        scenario.lambda
    );
    Ok(())
}

fn print_report(report: &RunReport) {
    println!("algorithm: {}", report.algorithm);
    println!("seed: {}", report.seed);
    println!("objective: {:.4}", report.breakdown.objective);
    println!("comm: {:.4}", report.breakdown.comm);
    println!("comp: {:.4}", report.breakdown.comp);
    println!("profit: {:.4}", report.breakdown.profit);
    println!("allocated: {}", report.metrics.allocated_count);
    println!("profit_cost_ratio: {:.4}", report.metrics.profit_cost_ratio);
    println!(
        "utilization_pct: {:.4}",
        report.metrics.utilization_percent
    );
    println!("overloaded: {}", report.overloaded);
    println!("iterations: {}", report.history.len());
    println!("wall_ms: {}", report.wall.as_millis());
}

fn run_single(cli: &Cli) -> Result<()> {
    let Command::Run { algorithm } = &cli.command else {
        unreachable!()
    };
    let algorithm: Algorithm = algorithm.parse().map_err(anyhow::Error::msg)?;
    let scenario = load_or_generate(cli)?;
    let costs = all_pairs_optimal_cost(&scenario.topology);
    let report = match algorithm {
        Algorithm::Mfi => run_pecco_mfi(&scenario, &costs, &mfi_params(cli))?,
        Algorithm::Mfo => run_mfo(&scenario, &costs, &mfo_params(cli), None)?,
        Algorithm::Greedy => run_greedy(&scenario, &costs),
        Algorithm::Random => run_random_search(&scenario, &costs, &mfo_params(cli))?,
    };
    print_report(&report);
    Ok(())
}

fn bench(cli: &Cli) -> Result<()> {
    let mut algorithms = Vec::new();
    for name in cli.algorithms.split(',').filter(|s| !s.is_empty()) {
        let algorithm: Algorithm = name.parse().map_err(anyhow::Error::msg)?;
        if !algorithms.contains(&algorithm) {
            algorithms.push(algorithm);
        }
    }
    if algorithms.is_empty() {
        bail!("at least one algorithm is required");
    }

    let source = match &cli.scenario {
        Some(path) => ScenarioSource::Path(path.clone()),
        None => ScenarioSource::Generated {
            config: GeneratorConfig::default(),
            seed: cli.seed,
        },
    };
    let mut source = source;
    if let Some(lambda) = cli.lambda {
        // Apply the override up front so every run sees the same scenario.
        let mut scenario = pecco::bench::resolve_scenario(&source)?;
        scenario.lambda = lambda;
        source = ScenarioSource::Inline(Box::new(scenario));
    }

    let cfg = BenchConfig {
        source,
        algorithms,
        repeats: cli.repeats,
        base_seed: cli.seed,
        mfo: mfo_params(cli),
        mfi: mfi_params(cli),
    };
    let report = run_benchmark(&cfg)?;

    let format: TableFormat = cli.format.into();
    let dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("bench_out"));
    let written = write_outputs(&report, format, &dir)?;
    print!("{}", render_tables(&report, format));
    for summary in &report.summaries {
        for (seed, error) in &summary.failures {
            eprintln!("warning: {} seed {seed} failed: {error}", summary.algorithm);
        }
    }
    eprintln!("wrote {} files under {}", written.len(), dir.display());
    Ok(())
}

fn oracle(cli: &Cli) -> Result<()> {
    let scenario = load_or_generate(cli)?;
    let costs = all_pairs_optimal_cost(&scenario.topology);
    let result = exhaustive_optimum(&scenario, &costs, cli.ub)?;
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}
