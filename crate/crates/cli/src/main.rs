//! Command-line front end: solve instances, validate and plot solution
//! files, export the MILP, run the exhaustive oracle, and sweep the
//! benchmark matrix.
//!
//! Exit codes: 0 success, 1 infeasible instance or failed validation,
//! 2 usage or input-parsing errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use evrptw_core::bench::{aggregate, run_matrix, BenchConfig, ReportFormat};
use evrptw_core::eval::{validate_solution, Solution};
use evrptw_core::graph::{build_graph, RoutingGraph, DEFAULT_STATION_COPIES};
use evrptw_core::instance::{CoverageScenario, Instance, Weights};
use evrptw_core::milp::{build_model, ModelMode};
use evrptw_core::oracle::{enumerate_oracle, OracleConfig};
use evrptw_core::plot::{render_svg, PlotConfig};
use evrptw_core::solver::{solve, SearchLimits, SolveStatus, SolverConfig};

#[derive(Parser)]
#[command(
    name = "evrptw",
    about = "Exact solver suite for electric vehicle routing with time windows \
             and mixed station/wireless charging"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and emit a solution JSON document.
    Solve(SolveArgs),
    /// Re-check a solution file against its instance from scratch.
    Validate(ValidateArgs),
    /// Export the arc-flow MILP in CPLEX LP format.
    ExportMilp(ExportArgs),
    /// Exhaustively enumerate all plans (small instances only).
    Oracle(OracleArgs),
    /// Solve an instance set across coverage levels and report.
    Bench(BenchArgs),
    /// Render a solution as a self-contained SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct ScenarioOpts {
    /// Uniform wireless coverage fraction applied to every arc.
    #[arg(long, default_value_t = 0.0)]
    coverage: f64,
    /// Scenario JSON with per-arc coverage (overrides --coverage).
    #[arg(long, conflicts_with = "coverage")]
    scenario: Option<PathBuf>,
    /// Wireless charging rate per distance unit.
    #[arg(long, default_value_t = 0.9)]
    wireless_rate: f64,
    /// Copies created per physical charging station.
    #[arg(long, default_value_t = DEFAULT_STATION_COPIES)]
    station_copies: usize,
}

#[derive(Args)]
struct SolverOpts {
    /// Objective weights as m1,m2,m3 (vehicles, distance, time).
    #[arg(long, default_value = "10000,1,1", value_parser = parse_weights)]
    weights: Weights,
    /// Relative optimality gap accepted as proof.
    #[arg(long, default_value_t = 1e-3)]
    gap: f64,
    /// Time limit in seconds; 0 disables it. Defaults to the
    /// EVRPTW_TIME_LIMIT environment variable, then 3000.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Abort after exploring this many search nodes.
    #[arg(long)]
    node_limit: Option<u64>,
    /// Optimize (vehicles, distance, time) lexicographically.
    #[arg(long)]
    lexicographic: bool,
}

impl SolverOpts {
    fn to_config(&self) -> SolverConfig {
        let seconds = self
            .time_limit
            .or_else(|| {
                std::env::var("EVRPTW_TIME_LIMIT")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(3000.0);
        SolverConfig {
            weights: self.weights,
            limits: SearchLimits {
                time_limit: (seconds > 0.0).then(|| Duration::from_secs_f64(seconds)),
                gap: self.gap,
                node_limit: self.node_limit,
            },
            lexicographic: self.lexicographic,
            use_lower_bound: true,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    scenario: ScenarioOpts,
    #[command(flatten)]
    solver: SolverOpts,
    /// Write the solution JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Solution JSON produced by `solve`.
    #[arg(long)]
    solution: PathBuf,
    /// Station copies for the rebuilt graph; inferred from the
    /// solution's copy labels when omitted.
    #[arg(long)]
    station_copies: Option<usize>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    scenario: ScenarioOpts,
    /// Objective weights as m1,m2,m3.
    #[arg(long, default_value = "10000,1,1", value_parser = parse_weights)]
    weights: Weights,
    /// Emit the defective published row variant instead of the
    /// corrected formulation.
    #[arg(long)]
    literal: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    scenario: ScenarioOpts,
    /// Objective weights as m1,m2,m3.
    #[arg(long, default_value = "10000,1,1", value_parser = parse_weights)]
    weights: Weights,
    /// Refuse instances with more customers than this.
    #[arg(long, default_value_t = 6)]
    customer_cap: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Markdown,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files to sweep.
    #[arg(long, num_args = 1.., required = true)]
    instances: Vec<PathBuf>,
    /// Coverage levels of the sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.2, 0.4, 0.6])]
    coverages: Vec<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Worker threads for independent matrix cells.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Wireless charging rate per distance unit.
    #[arg(long, default_value_t = 0.9)]
    wireless_rate: f64,
    #[arg(long, default_value_t = DEFAULT_STATION_COPIES)]
    station_copies: usize,
    #[command(flatten)]
    solver: SolverOpts,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    /// Plot title; defaults to the instance name.
    #[arg(long)]
    title: Option<String>,
    #[arg(long)]
    station_copies: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_weights(raw: &str) -> Result<Weights, String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated numbers: m1,m2,m3".to_string());
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("'{part}' is not a number"))?;
    }
    Weights::new(values[0], values[1], values[2]).map_err(|e| e.to_string())
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading instance file {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_string());
    Instance::parse(&text, name)
        .with_context(|| format!("parsing instance file {}", path.display()))
}

fn load_scenario(opts: &ScenarioOpts) -> Result<CoverageScenario> {
    match &opts.scenario {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading scenario file {}", path.display()))?;
            CoverageScenario::from_json(&text)
                .with_context(|| format!("parsing scenario file {}", path.display()))
        }
        None => CoverageScenario::uniform(opts.coverage, opts.wireless_rate)
            .context("building uniform scenario"),
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Largest station-copy index named by the solution, so the rebuilt
/// graph is guaranteed to contain every node the plan refers to.
fn copies_in_solution(solution: &Solution) -> usize {
    let mut copies = DEFAULT_STATION_COPIES.max(1);
    for route in &solution.routes {
        for label in &route.nodes {
            if let Some((_, suffix)) = label.rsplit_once('#') {
                if let Ok(k) = suffix.parse::<usize>() {
                    copies = copies.max(k);
                }
            }
        }
    }
    copies
}

fn load_solution_graph(
    instance_path: &Path,
    solution_path: &Path,
    copies_override: Option<usize>,
) -> Result<(RoutingGraph, Solution)> {
    let instance = load_instance(instance_path)?;
    let text = fs::read_to_string(solution_path)
        .with_context(|| format!("reading solution file {}", solution_path.display()))?;
    let solution = Solution::from_json(&text)
        .with_context(|| format!("parsing solution file {}", solution_path.display()))?;
    let copies = copies_override.unwrap_or_else(|| copies_in_solution(&solution));
    let graph = build_graph(&instance, &solution.scenario, copies);
    Ok((graph, solution))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::ExportMilp(args) => cmd_export(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let scenario = load_scenario(&args.scenario)?;
    let graph = build_graph(&instance, &scenario, args.scenario.station_copies);
    let config = args.solver.to_config();
    let result = solve(&graph, &config);

    let gap = result
        .stats
        .gap
        .map(|g| format!(" | gap {g:.6}"))
        .unwrap_or_default();
    eprintln!(
        "status {} | nodes {} | {:.2}s{gap}",
        result.status, result.stats.nodes_explored, result.stats.solve_seconds
    );

    match result.routes {
        Some(routes) => {
            let solution =
                Solution::from_routes(&instance.name, &scenario, &config.weights, &routes);
            emit(&args.output, &solution.to_json())?;
            if result.status == SolveStatus::FeasibleTimeout {
                eprintln!("warning: limit reached; best solution found is not proven optimal");
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            eprintln!("no feasible solution ({})", result.status);
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let (graph, solution) =
        load_solution_graph(&args.instance, &args.solution, args.station_copies)?;
    let report = validate_solution(&graph, &solution);
    if report.is_valid() {
        let recomputed = report
            .recomputed
            .map(|o| format!(" (weighted objective {})", o.weighted))
            .unwrap_or_default();
        println!("valid{recomputed}");
        Ok(ExitCode::SUCCESS)
    } else {
        for violation in &report.violations {
            eprintln!("violation: {violation}");
        }
        eprintln!("{} violation(s)", report.violations.len());
        Ok(ExitCode::from(1))
    }
}

fn cmd_export(args: ExportArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let scenario = load_scenario(&args.scenario)?;
    let graph = build_graph(&instance, &scenario, args.scenario.station_copies);
    let mode = if args.literal {
        ModelMode::Literal
    } else {
        ModelMode::Corrected
    };
    let model = build_model(&graph, &args.weights, mode);
    emit(&args.output, &model.export_lp())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let scenario = load_scenario(&args.scenario)?;
    let graph = build_graph(&instance, &scenario, args.scenario.station_copies);
    let report = enumerate_oracle(
        &graph,
        &args.weights,
        &OracleConfig {
            customer_cap: args.customer_cap,
            station_insertions: None,
        },
    )
    .map_err(|e| anyhow!(e))?;

    eprintln!("candidates evaluated: {}", report.candidates);
    match report.best {
        Some(best) => {
            let solution =
                Solution::from_routes(&instance.name, &scenario, &args.weights, &best.routes);
            emit(&args.output, &solution.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        None => {
            eprintln!("no feasible solution exists");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let mut instances = Vec::with_capacity(args.instances.len());
    for path in &args.instances {
        instances.push(load_instance(path)?);
    }
    let config = BenchConfig {
        wireless_rate: args.wireless_rate,
        station_copies: args.station_copies,
        solver: args.solver.to_config(),
        workers: args.workers.max(1),
    };
    let rows = run_matrix(&instances, &args.coverages, &config)?;
    let aggregates = aggregate(&rows);
    let format = match args.format {
        OutputFormat::Csv => ReportFormat::Csv,
        OutputFormat::Json => ReportFormat::Json,
        OutputFormat::Markdown => ReportFormat::Markdown,
    };
    emit(&args.output, &evrptw_core::bench::render_report(&rows, &aggregates, format))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(args: PlotArgs) -> Result<ExitCode> {
    let (graph, solution) =
        load_solution_graph(&args.instance, &args.solution, args.station_copies)?;
    let mut routes = Vec::with_capacity(solution.routes.len());
    for (ri, route) in solution.routes.iter().enumerate() {
        match evrptw_core::eval::evaluate_route(&graph, &route.nodes) {
            Ok(eval) => routes.push(eval),
            Err(err) => {
                eprintln!("route {ri} cannot be replayed: {err}");
                return Ok(ExitCode::from(1));
            }
        }
    }
    let title = args.title.unwrap_or_else(|| solution.instance.clone());
    let svg = render_svg(&graph, &routes, &title, &PlotConfig::default());
    emit(&args.output, &svg)?;
    Ok(ExitCode::SUCCESS)
}
