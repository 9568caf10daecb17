//! `chap`: solve, benchmark, generate and verify weekly rostering instances.
//!
//! Exit codes: 0 success (and, for `solve`, a feasible best schedule);
//! 1 bad input of any kind; 2 a clean run whose best schedule is infeasible;
//! 3 a solution file that fails verification.

use anyhow::{anyhow, bail, Context, Result};
use chap_core::engine::{chap_batch, chap_solve, BenchInstance, SolverParams};
use chap_core::eval::FitnessWeights;
use chap_core::generator::{generate, GeneratorConfig};
use chap_core::instance::Instance;
use chap_core::oracle::exhaustive_solve;
use chap_core::solution::{parse_targets, write_trace, SolutionFile};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "chap", version, about = "Weekly nurse rostering solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and report the best schedule found
    Solve(SolveArgs),
    /// Solve instances repeatedly and tabulate per-instance statistics
    Bench(BenchArgs),
    /// Generate a random instance with a planted feasible schedule
    Gen(GenArgs),
    /// Check a solution file against its instance
    Verify(VerifyArgs),
}

/// Solver knobs shared by `solve` and `bench`. Anything not given keeps the
/// reference defaults, with grade weights sized to the instance.
#[derive(Args)]
struct ParamArgs {
    /// Seed of the run (bench run r uses seed + r)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration budget per run
    #[arg(long = "max-iters")]
    max_iters: Option<u64>,
    /// Random elimination rate applied after the fitness threshold pass
    #[arg(long)]
    rm: Option<f64>,
    /// Probability of the cover rule during repair
    #[arg(long)]
    p1: Option<f64>,
    /// Probability of the combined rule during repair
    #[arg(long)]
    p2: Option<f64>,
    /// Probability of a random feasible pattern during repair
    #[arg(long)]
    p3: Option<f64>,
    /// Preference weight inside the combined rule
    #[arg(long)]
    wp: Option<f64>,
    /// Comma-separated shortfall weights, one per grade level
    #[arg(long, value_delimiter = ',')]
    wgrade: Option<Vec<f64>>,
    /// Penalty per unit of unmet demand in the objective
    #[arg(long)]
    wdemand: Option<u64>,
    /// Preference share of the fitness blend; coverage gets the rest
    #[arg(long)]
    weval: Option<f64>,
    /// Stop a run early once its best penalty reaches this value
    #[arg(long)]
    target: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (canonical JSON)
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Write the best schedule here as a solution file
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write a per-iteration convergence trace here as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files; may be given multiple times
    #[arg(long, required = true, num_args = 1..)]
    instance: Vec<PathBuf>,
    /// Runs per instance
    #[arg(long, default_value_t = 20)]
    runs: usize,
    /// Sidecar of known optima: `name cost` per line, matched by file stem
    #[arg(long)]
    targets: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
    /// Also write the table to this file
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    /// Number of nurses
    #[arg(long)]
    nurses: usize,
    /// Catalogue size
    #[arg(long, default_value_t = 8)]
    patterns: usize,
    /// Grade bands
    #[arg(long, default_value_t = 3)]
    grades: usize,
    /// Demand as a fraction of the planted schedule's cover, in [0, 1]
    #[arg(long, default_value_t = 0.8)]
    tightness: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest feasible-set size per nurse
    #[arg(long, default_value_t = 1)]
    feasible_min: usize,
    /// Largest feasible-set size per nurse (default: whole catalogue)
    #[arg(long)]
    feasible_max: Option<usize>,
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file the solution claims to solve
    #[arg(long)]
    instance: PathBuf,
    /// Solution file to check
    #[arg(long)]
    solution: PathBuf,
    /// Demand penalty the claimed cost was computed under
    #[arg(long, default_value_t = 200)]
    wdemand: u64,
    /// Additionally require the claimed cost to be the true optimum
    #[arg(long)]
    oracle: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Bench(args) => run_bench(&args),
        Command::Gen(args) => run_gen(&args),
        Command::Verify(args) => run_verify(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&bytes).with_context(|| format!("loading {}", path.display()))
}

/// Reference defaults, grade weights sized to the instance, then explicit
/// flags layered on top. Validation happens inside the solver entry points.
fn resolve_params(args: &ParamArgs, instance: &Instance) -> Result<SolverParams> {
    let mut params = SolverParams::for_grades(instance.grades);
    params.seed = args.seed;
    if let Some(v) = args.max_iters {
        params.max_iterations = v;
    }
    if let Some(v) = args.rm {
        params.perturbation.removal_rate = v;
    }
    if let Some(v) = args.p1 {
        params.rules.cover_rate = v;
    }
    if let Some(v) = args.p2 {
        params.rules.combined_rate = v;
    }
    if let Some(v) = args.p3 {
        params.rules.random_rate = v;
    }
    if let Some(v) = args.wp {
        params.rules.preference_weight = v;
    }
    if let Some(v) = &args.wgrade {
        params.rules.grade_weights = v.clone();
    }
    if let Some(v) = args.wdemand {
        params.demand_penalty = v;
    }
    if let Some(v) = args.weval {
        params.eval_weights = FitnessWeights::from_preference_share(v)
            .map_err(|e| anyhow!("--weval: {e}"))?;
    }
    params.target_cost = args.target;
    Ok(params)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run_solve(args: &SolveArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let mut params = resolve_params(&args.params, &instance)?;
    params.collect_trace = args.trace.is_some();
    let report = chap_solve(&instance, &params)?;

    if let Some(path) = &args.output {
        let solution = SolutionFile::from_report(&report);
        fs::write(path, solution.to_canonical_json())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.trace {
        let records = report.trace.as_deref().unwrap_or(&[]);
        let file =
            fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_trace(file, records)?;
    }

    let name = stem(&args.instance);
    match args.format {
        Format::Human => {
            println!(
                "instance: {name} ({} nurses, {} patterns, {} grades)",
                instance.nurse_count(),
                instance.pattern_count(),
                instance.grades
            );
            if report.feasible {
                println!("best penalty: {} (feasible)", report.cost.penalty);
            } else {
                println!(
                    "best penalty: {} (infeasible, reported cost {})",
                    report.cost.penalty, report.best_cost
                );
            }
            println!("  preference: {}", report.cost.preference_total);
            println!("  shortfall:  {}", report.cost.shortfall_total);
            println!("iterations: {} of {}", report.iterations, params.max_iterations);
            println!("wall time:  {:.3}s", report.wall_time.as_secs_f64());
        }
        Format::Csv => {
            println!("instance,feasible,best_cost,preference,shortfall,penalty,iterations,seed");
            println!(
                "{name},{},{},{},{},{},{},{}",
                report.feasible,
                report.best_cost,
                report.cost.preference_total,
                report.cost.shortfall_total,
                report.cost.penalty,
                report.iterations,
                params.seed
            );
        }
    }
    Ok(if report.feasible { 0 } else { 2 })
}

fn run_bench(args: &BenchArgs) -> Result<u8> {
    let targets: HashMap<String, u64> = match &args.targets {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_targets(&text)
                .with_context(|| format!("parsing {}", path.display()))?
                .into_iter()
                .collect()
        }
        None => HashMap::new(),
    };

    let mut instances = Vec::new();
    for path in &args.instance {
        let name = stem(path);
        let instance = load_instance(path)?;
        let target = targets.get(&name).copied();
        instances.push(BenchInstance { name, instance, target });
    }
    // Grade weights must fit every instance; size them per instance would
    // change the meaning of an explicit --wgrade, so require uniformity.
    let grades = instances[0].instance.grades;
    if let Some(other) = instances.iter().find(|b| b.instance.grades != grades) {
        bail!(
            "instances mix grade counts ({} vs {} in {})",
            grades,
            other.instance.grades,
            other.name
        );
    }
    let params = resolve_params(&args.params, &instances[0].instance)?;
    let reports = chap_batch(&instances, &params, args.runs)?;

    let table = render_batch(&reports, args.format);
    print!("{table}");
    if let Some(path) = &args.output {
        fs::write(path, &table).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn render_batch(reports: &[chap_core::engine::BatchReport], format: Format) -> String {
    let opt = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
    let count = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    let mut out = String::new();
    match format {
        Format::Human => {
            let width = reports
                .iter()
                .map(|r| r.name.len())
                .max()
                .unwrap_or(8)
                .max("instance".len());
            out.push_str(&format!(
                "{:<width$}  {:>4}  {:>6}  {:>8}  {:>4}  {:>4}  {:>7}\n",
                "instance", "runs", "best", "mean", "inf", "opt", "within3"
            ));
            for r in reports {
                out.push_str(&format!(
                    "{:<width$}  {:>4}  {:>6}  {:>8.2}  {:>4}  {:>4}  {:>7}\n",
                    r.name,
                    r.runs,
                    opt(r.best),
                    r.mean,
                    r.infeasible,
                    count(r.optimal),
                    count(r.within_three)
                ));
            }
        }
        Format::Csv => {
            out.push_str("instance,runs,best,mean,inf,opt,within3\n");
            for r in reports {
                out.push_str(&format!(
                    "{},{},{},{:.2},{},{},{}\n",
                    r.name,
                    r.runs,
                    opt(r.best),
                    r.mean,
                    r.infeasible,
                    count(r.optimal),
                    count(r.within_three)
                ));
            }
        }
    }
    out
}

fn run_gen(args: &GenArgs) -> Result<u8> {
    let config = GeneratorConfig {
        nurses: args.nurses,
        patterns: args.patterns,
        grades: args.grades,
        tightness: args.tightness,
        seed: args.seed,
        feasible_min: args.feasible_min,
        feasible_max: args.feasible_max.unwrap_or(usize::MAX),
    };
    let instance = generate(&config)?;
    let text = instance.to_canonical_json();
    match &args.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "wrote {} ({} nurses, {} patterns, {} grades, tightness {}, seed {})",
                path.display(),
                args.nurses,
                args.patterns,
                args.grades,
                args.tightness,
                args.seed
            );
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn run_verify(args: &VerifyArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let bytes = fs::read(&args.solution)
        .with_context(|| format!("reading {}", args.solution.display()))?;
    let solution = SolutionFile::from_json(&bytes)
        .with_context(|| format!("loading {}", args.solution.display()))?;

    if let Err(err) = solution.verify(&instance, args.wdemand) {
        eprintln!("verification failed: {err}");
        return Ok(3);
    }
    if args.oracle {
        let result = exhaustive_solve(&instance, args.wdemand)
            .context("oracle comparison requested")?;
        if solution.cost.penalty != result.optimal_cost {
            eprintln!(
                "verification failed: cost {} is not optimal, the optimum is {}",
                solution.cost.penalty, result.optimal_cost
            );
            return Ok(3);
        }
        println!(
            "ok: penalty {} matches a recount and the exhaustive optimum",
            solution.cost.penalty
        );
    } else {
        println!("ok: penalty {} matches a recount", solution.cost.penalty);
    }
    Ok(0)
}
