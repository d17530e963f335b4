//! Command-line front end: solving, benchmark generation, plan validation
//! and batch benchmarking.

pub mod cmd;
pub mod gen;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use tide_core::domain::{export_constrained_pddl, ground, parse_domain, parse_problem, DomainError};
use tide_core::ltlf::{evaluate, parse, Formula, ParseError, Trace};
use tide_core::reach_avoid::Plan;
use tide_core::tide::{solve, NoPlan, PlannerSolver, RealizationMode, TideConfig, TideError};
use tide_core::{GroundDomain, WorldStateBits};

pub use cmd::main_with;
pub use gen::{gen_blocksworld, Benchmark, Generated};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("goal: {0}")]
    Goal(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Tide(#[from] TideError),
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses `bfs`, `planner:bfs` or `planner:astar`.
pub fn parse_mode(s: &str) -> Result<RealizationMode, CliError> {
    match s {
        "bfs" => Ok(RealizationMode::BfsHierarchical),
        "planner:bfs" => Ok(RealizationMode::Planner(PlannerSolver::Bfs)),
        "planner:astar" => Ok(RealizationMode::Planner(PlannerSolver::Astar)),
        _ => Err(CliError::Usage(format!(
            "unknown mode `{s}` (expected bfs, planner:bfs or planner:astar)"
        ))),
    }
}

pub fn mode_name(m: RealizationMode) -> &'static str {
    match m {
        RealizationMode::BfsHierarchical => "bfs",
        RealizationMode::Planner(PlannerSolver::Bfs) => "planner:bfs",
        RealizationMode::Planner(PlannerSolver::Astar) => "planner:astar",
    }
}

/// A grounded problem instance with its PDDL goal.
pub struct Instance {
    pub domain: Arc<GroundDomain>,
    pub start: WorldStateBits,
    pub pddl_goal: Formula,
}

pub fn load_instance(domain_text: &str, problem_text: &str) -> Result<Instance, CliError> {
    let model = parse_domain(domain_text)?;
    let problem = parse_problem(problem_text, &model)?;
    let mut objects = model.constants.clone();
    objects.extend(problem.objects.iter().cloned());
    let domain = Arc::new(ground(&model, &objects)?);
    let start = domain.state(&problem.init)?;
    Ok(Instance {
        domain,
        start,
        pddl_goal: problem.goal,
    })
}

/// The LTLf goal from `--goal`, `--goal-file`, or else eventually reaching
/// the problem's own goal.
pub fn resolve_goal(goal: Option<&str>, goal_file: Option<&Path>, inst: &Instance) -> Result<Formula, CliError> {
    match (goal, goal_file) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --goal or --goal-file".into())),
        (Some(g), None) => Ok(parse(g)?),
        (None, Some(p)) => Ok(parse(read(p)?.trim())?),
        (None, None) => Ok(Formula::eventually(inst.pddl_goal.clone())),
    }
}

/// Machine-readable summary of a solve run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// `plan`, `no_plan`, `inconclusive`, `attempt_limit` or `error`.
    pub outcome: String,
    pub plan_length: Option<usize>,
    /// Seconds spent translating the goal; callers add parsing time.
    pub translation_time: f64,
    /// Seconds spent after translation.
    pub search_time: f64,
    pub solver_calls: usize,
    pub cache_hits: usize,
    pub backtracking_steps: usize,
    /// DFA states of the realized trace.
    pub trace: Option<Vec<usize>>,
    pub mode: String,
    pub dfa_states: usize,
    pub realizations: usize,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.outcome.as_str() {
            "plan" => 0,
            "no_plan" => 1,
            _ => 2,
        }
    }
}

pub struct SolveRun {
    pub report: RunReport,
    pub plan: Option<Plan>,
    pub domain: Arc<GroundDomain>,
}

/// Solves `goal` from the instance start and summarizes the run.
/// With `export`, every subproblem is written as a PDDL pair into the directory.
pub fn run_solve(
    inst: &Instance,
    goal: &Formula,
    cfg: &TideConfig,
    export: Option<&Path>,
) -> Result<SolveRun, CliError> {
    let mut cfg = cfg.clone();
    cfg.record_subproblems |= export.is_some();
    let t0 = std::time::Instant::now();
    let r = solve(inst.domain.clone(), &inst.start, goal, &cfg)?;
    log::info!("solve finished in {:?}", t0.elapsed());
    if let Some(dir) = export {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for (i, sp) in r.subproblems.iter().enumerate() {
            let (d, p) = export_constrained_pddl(&sp.problem)?;
            let stem = format!("sub{i:03}-{}-q{}-q{}", sp.case, sp.source, sp.target);
            write(&dir.join(format!("{stem}-domain.pddl")), &d)?;
            write(&dir.join(format!("{stem}-problem.pddl")), &p)?;
        }
    }
    let outcome = match &r.outcome {
        Ok(_) => "plan",
        Err(NoPlan::Proven) => "no_plan",
        Err(NoPlan::Inconclusive) => "inconclusive",
        Err(NoPlan::AttemptLimit) => "attempt_limit",
    };
    let report = RunReport {
        outcome: outcome.into(),
        plan_length: r.plan().map(Plan::len),
        translation_time: r.stats.translation_time.as_secs_f64(),
        search_time: r.stats.search_time.as_secs_f64(),
        solver_calls: r.stats.solver_calls,
        cache_hits: r.stats.cache_hits,
        backtracking_steps: r.stats.backtracking_steps,
        trace: r.trace.clone(),
        mode: mode_name(cfg.mode).into(),
        dfa_states: r.stats.dfa_states,
        realizations: r.stats.realizations,
    };
    Ok(SolveRun {
        report,
        plan: r.outcome.ok(),
        domain: inst.domain.clone(),
    })
}

/// First problem found while checking a plan.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("line {line}: unknown action `{text}`")]
    UnknownAction { line: usize, text: String },
    #[error("step {step}: {action} is not applicable")]
    NotApplicable { step: usize, action: String },
    #[error("the {states}-state execution does not satisfy the goal")]
    Goal { states: usize },
}

/// Reads a plan file, one `(action args)` per line; `;` starts a comment.
pub fn parse_plan(d: &GroundDomain, text: &str) -> Result<Plan, Violation> {
    let mut steps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let a = d.action_by_text(line).ok_or_else(|| Violation::UnknownAction {
            line: i + 1,
            text: line.to_string(),
        })?;
        steps.push(a);
    }
    Ok(Plan::new(steps))
}

/// Replays `plan_text` from the start and checks `goal` on the label trace.
pub fn validate(inst: &Instance, goal: &Formula, plan_text: &str) -> Result<(), Violation> {
    let d = &inst.domain;
    let plan = parse_plan(d, plan_text)?;
    let mut s = inst.start.clone();
    let mut word = vec![d.world(&s)];
    for (i, &a) in plan.steps.iter().enumerate() {
        s = d.successor(&s, a).map_err(|_| Violation::NotApplicable {
            step: i + 1,
            action: d.actions[a].to_string(),
        })?;
        word.push(d.world(&s));
    }
    let states = word.len();
    let trace = Trace::new(word).expect("at least the start state");
    if evaluate(&trace, goal) {
        Ok(())
    } else {
        Err(Violation::Goal { states })
    }
}

/// One row of a benchmark sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub benchmark: String,
    pub n: usize,
    pub optimum: usize,
    pub valid: bool,
    #[serde(flatten)]
    pub report: RunReport,
}

/// Generates and solves each size in `sizes`, in parallel across `threads`.
pub fn bench(benchmark: Benchmark, sizes: &[usize], cfg: &TideConfig, threads: usize) -> Result<Vec<BenchRow>, CliError> {
    let run_one = |n: usize| -> Result<BenchRow, CliError> {
        let g = gen_blocksworld(benchmark, n)?;
        let inst = load_instance(&g.domain, &g.problem)?;
        let t0 = std::time::Instant::now();
        let goal = parse(&g.goal)?;
        let parse_time = t0.elapsed().as_secs_f64();
        let mut run = run_solve(&inst, &goal, cfg, None)?;
        run.report.translation_time += parse_time;
        let valid = match &run.plan {
            Some(p) => validate(&inst, &goal, &p.to_text(&inst.domain)).is_ok(),
            None => false,
        };
        Ok(BenchRow {
            benchmark: benchmark.to_string(),
            n,
            optimum: benchmark.optimum(n),
            valid,
            report: run.report,
        })
    };
    let threads = threads.max(1);
    let mut rows: Vec<Option<Result<BenchRow, CliError>>> = (0..sizes.len()).map(|_| None).collect();
    for chunk in sizes.iter().enumerate().collect::<Vec<_>>().chunks(threads) {
        let done: Vec<(usize, Result<BenchRow, CliError>)> = std::thread::scope(|sc| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&(i, &n)| (i, sc.spawn(move || run_one(n))))
                .collect();
            handles
                .into_iter()
                .map(|(i, h)| (i, h.join().expect("benchmark worker panicked")))
                .collect()
        });
        for (i, r) in done {
            rows[i] = Some(r);
        }
    }
    rows.into_iter().map(|r| r.expect("every size ran")).collect()
}

/// CSV rendering of benchmark rows with a header line.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "benchmark,n,mode,outcome,plan_length,optimum,valid,translation_time,search_time,solver_calls,cache_hits,backtracking_steps\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{},{},{}\n",
            r.benchmark,
            r.n,
            r.report.mode,
            r.report.outcome,
            r.report.plan_length.map_or(String::new(), |l| l.to_string()),
            r.optimum,
            r.valid,
            r.report.translation_time,
            r.report.search_time,
            r.report.solver_calls,
            r.report.cache_hits,
            r.report.backtracking_steps
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_clear() -> Instance {
        let g = gen_blocksworld(Benchmark::Reversal, 3).unwrap();
        load_instance(&g.domain, &g.problem).unwrap()
    }

    #[test]
    fn modes_round_trip() {
        for s in ["bfs", "planner:bfs", "planner:astar"] {
            assert_eq!(mode_name(parse_mode(s).unwrap()), s);
        }
        assert!(parse_mode("dfs").is_err());
    }

    #[test]
    fn validate_diagnostics() {
        let inst = three_clear();
        let goal = parse("F(on_b2_b1 & X(F(on_b3_b2)))").unwrap();
        let plan = "(pick-up b2)\n(stack b2 b1)\n(pick-up b3)\n(stack b3 b2)\n";
        assert_eq!(validate(&inst, &goal, plan), Ok(()));
        let swapped = "(stack b2 b1)\n(pick-up b2)\n(pick-up b3)\n(stack b3 b2)\n";
        assert!(matches!(
            validate(&inst, &goal, swapped),
            Err(Violation::NotApplicable { step: 1, .. })
        ));
        assert!(matches!(
            validate(&inst, &goal, "(pick-up b2)\n\n(jump b2)"),
            Err(Violation::UnknownAction { line: 3, .. })
        ));
        assert_eq!(
            validate(&inst, &goal, "(pick-up b2)"),
            Err(Violation::Goal { states: 2 })
        );
        let p = parse("F(ontable_b1)").unwrap();
        assert_eq!(validate(&inst, &p, ""), Ok(()));
    }

    #[test]
    fn report_keys_are_stable() {
        let inst = three_clear();
        let cfg = TideConfig::default();
        let keys = |g: &str| {
            let r = run_solve(&inst, &parse(g).unwrap(), &cfg, None).unwrap().report;
            let v = serde_json::to_value(&r).unwrap();
            v.as_object().unwrap().keys().cloned().collect::<Vec<_>>()
        };
        assert_eq!(keys("F(on_b2_b1)"), keys("false"));
    }

    #[test]
    fn default_goal_is_the_problem_goal() {
        let inst = three_clear();
        let g = resolve_goal(None, None, &inst).unwrap();
        let r = run_solve(&inst, &g, &TideConfig::default(), None).unwrap();
        assert_eq!(r.report.plan_length, Some(4));
        assert!(resolve_goal(Some("F(p)"), Some(Path::new("x")), &inst).is_err());
    }

    #[test]
    fn bench_rows_in_order() {
        let rows = bench(Benchmark::Reversal, &[2, 3], &TideConfig::default(), 2).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), [2, 3]);
        assert!(rows.iter().all(|r| r.valid && r.report.plan_length == Some(r.optimum)));
        let csv = bench_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
    }
}
