//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tide_core::TideConfig;

use crate::{
    bench, bench_csv, gen_blocksworld, load_instance, parse_mode, read, resolve_goal, run_solve, validate,
    write, Benchmark, CliError,
};

#[derive(Debug, Parser)]
#[command(name = "tide", version, about = "Temporal task planning with LTLf goals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a plan satisfying an LTLf goal.
    Solve(SolveArgs),
    /// Write a blocksworld benchmark instance.
    Gen(GenArgs),
    /// Check a plan against an LTLf goal.
    Validate(ValidateArgs),
    /// Solve a range of benchmark sizes and print CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub problem: PathBuf,
    /// LTLf goal; defaults to eventually reaching the problem goal.
    #[arg(long)]
    pub goal: Option<String>,
    #[arg(long)]
    pub goal_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuningArgs {
    /// bfs, planner:bfs or planner:astar
    #[arg(long, default_value = "bfs")]
    pub mode: String,
    #[arg(long)]
    pub cycle_cost: Option<f64>,
    #[arg(long)]
    pub success_cost: Option<f64>,
    #[arg(long)]
    pub failure_cost: Option<f64>,
    #[arg(long)]
    pub hill_threshold: Option<usize>,
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long)]
    pub node_budget: Option<usize>,
    #[arg(long)]
    pub max_realizations: Option<usize>,
}

impl TuningArgs {
    pub fn config(&self) -> Result<TideConfig, CliError> {
        let mut c = TideConfig {
            mode: parse_mode(&self.mode)?,
            caching: !self.no_cache,
            ..TideConfig::default()
        };
        if let Some(v) = self.cycle_cost {
            c.cycle_cost = v;
        }
        if let Some(v) = self.success_cost {
            c.success_cost = v;
        }
        if let Some(v) = self.failure_cost {
            c.failure_cost = v;
        }
        if let Some(v) = self.hill_threshold {
            c.hill_threshold = v;
        }
        if let Some(v) = self.node_budget {
            c.node_budget = v;
        }
        if let Some(v) = self.max_realizations {
            c.max_realizations = v;
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Directory receiving one PDDL pair per subproblem.
    #[arg(long)]
    pub export_subproblems: Option<PathBuf>,
    /// JSON run report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Plan file, one action per line.
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// reversal or relocation
    pub benchmark: String,
    pub n: usize,
    /// Output directory for domain.pddl, problem.pddl and goal.ltl.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub plan: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// reversal or relocation
    pub benchmark: String,
    #[arg(long, default_value_t = 3)]
    pub from: usize,
    #[arg(long, default_value_t = 6)]
    pub to: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub tuning: TuningArgs,
}

fn solve_cmd(a: &SolveArgs) -> Result<i32, CliError> {
    let inst = load_instance(&read(&a.problem.domain)?, &read(&a.problem.problem)?)?;
    let t0 = std::time::Instant::now();
    let goal = resolve_goal(a.problem.goal.as_deref(), a.problem.goal_file.as_deref(), &inst)?;
    let parse_time = t0.elapsed().as_secs_f64();
    let cfg = a.tuning.config()?;
    let mut run = run_solve(&inst, &goal, &cfg, a.export_subproblems.as_deref())?;
    run.report.translation_time += parse_time;
    match &run.plan {
        Some(p) => {
            let text = p.to_text(&run.domain);
            print!("{text}");
            if let Some(path) = &a.plan_out {
                write(path, &text)?;
            }
        }
        None => eprintln!("no plan: {}", run.report.outcome),
    }
    if let Some(path) = &a.report {
        write(path, &serde_json::to_string_pretty(&run.report)?)?;
    }
    Ok(run.report.exit_code())
}

fn gen_cmd(a: &GenArgs) -> Result<i32, CliError> {
    let b: Benchmark = a.benchmark.parse()?;
    let g = gen_blocksworld(b, a.n)?;
    std::fs::create_dir_all(&a.out).map_err(|source| CliError::Io {
        path: a.out.clone(),
        source,
    })?;
    write(&a.out.join("domain.pddl"), &g.domain)?;
    write(&a.out.join("problem.pddl"), &g.problem)?;
    write(&a.out.join("goal.ltl"), &format!("{}\n", g.goal))?;
    Ok(0)
}

fn validate_cmd(a: &ValidateArgs) -> Result<i32, CliError> {
    let inst = load_instance(&read(&a.problem.domain)?, &read(&a.problem.problem)?)?;
    let goal = resolve_goal(a.problem.goal.as_deref(), a.problem.goal_file.as_deref(), &inst)?;
    match validate(&inst, &goal, &read(&a.plan)?) {
        Ok(()) => {
            println!("valid");
            Ok(0)
        }
        Err(v) => {
            println!("invalid: {v}");
            Ok(1)
        }
    }
}

fn bench_cmd(a: &BenchArgs) -> Result<i32, CliError> {
    let b: Benchmark = a.benchmark.parse()?;
    if a.from > a.to {
        return Err(CliError::Usage(format!("empty range {}..={}", a.from, a.to)));
    }
    let sizes: Vec<usize> = (a.from..=a.to).collect();
    let rows = bench(b, &sizes, &a.tuning.config()?, a.threads)?;
    print!("{}", bench_csv(&rows));
    Ok(if rows.iter().all(|r| r.valid) { 0 } else { 1 })
}

pub fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Solve(a) => solve_cmd(a),
        Command::Gen(a) => gen_cmd(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    }
}

/// Runs the command line and returns the process exit code:
/// 0 on success, 1 when no plan exists or a plan is invalid, 2 on errors.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
