//! Trace-guided decomposition of LTLf planning problems.
//!
//! Candidate DFA traces are selected by rank, realized in the domain one
//! transition at a time, and the outcome of each attempt is fed back into
//! the edge costs until a plan validates or every trace has been ruled out.

mod cache;
mod feedback;
mod realize;
mod select;
mod subproblem;

use std::sync::Arc;
use std::time::{Duration, Instant};

use log::debug;
use thiserror::Error;

use crate::automaton::{translate, Dfa, DfaError, EdgeCostTable, StateId, TranslateError, DEFAULT_CYCLE_COST, DEFAULT_STATE_CAP};
use crate::bdd::BddError;
use crate::domain::{DomainError, GroundDomain, WorldStateBits};
use crate::ltlf::{evaluate, Formula, Trace};
use crate::reach_avoid::{Plan, DEFAULT_NODE_BUDGET};

pub use cache::PrefixCache;
pub use feedback::apply_feedback;
pub use realize::{realize_with_bfs, realize_with_planner, Failure, Realization, RealizeContext};
pub use select::{generate_dfa_trace, FrozenQueue};
pub use subproblem::{create_subproblem, Case, Subproblem};

/// Solver used for each subproblem in planner mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlannerSolver {
    Bfs,
    Astar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealizationMode {
    /// One breadth-first search over the product of domain and trace.
    BfsHierarchical,
    /// One classical planning call per trace transition.
    Planner(PlannerSolver),
}

#[derive(Clone, Debug)]
pub struct TideConfig {
    pub cycle_cost: f64,
    pub success_cost: f64,
    pub failure_cost: f64,
    pub hill_threshold: usize,
    pub unintended_transition_cap: usize,
    pub mode: RealizationMode,
    pub caching: bool,
    pub node_budget: usize,
    pub state_cap: usize,
    /// Upper bound on realization attempts per solve.
    pub max_realizations: usize,
    /// Keep every subproblem handed to a solver in the result.
    pub record_subproblems: bool,
}

impl Default for TideConfig {
    fn default() -> Self {
        TideConfig {
            cycle_cost: DEFAULT_CYCLE_COST,
            success_cost: 0.0,
            failure_cost: 1000.0,
            hill_threshold: 4,
            unintended_transition_cap: 1000,
            mode: RealizationMode::BfsHierarchical,
            caching: true,
            node_budget: DEFAULT_NODE_BUDGET,
            state_cap: DEFAULT_STATE_CAP,
            max_realizations: 10_000,
            record_subproblems: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum TideError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error("edge {0} -> {1} has an unsatisfiable guard")]
    DeadEdge(StateId, StateId),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub translation_time: Duration,
    pub search_time: Duration,
    pub dfa_states: usize,
    pub realizations: usize,
    pub solver_calls: usize,
    pub cache_hits: usize,
    pub backtracking_steps: usize,
    pub unintended_transitions: usize,
    pub expanded: usize,
}

/// Why `solve` returned without a plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoPlan {
    /// Every candidate trace was pruned.
    Proven,
    /// Some traces failed for budget reasons and were never ruled out.
    Inconclusive,
    /// `max_realizations` was reached.
    AttemptLimit,
}

#[derive(Debug)]
pub struct TideResult {
    pub outcome: Result<Plan, NoPlan>,
    /// The DFA trace the plan realizes.
    pub trace: Option<Vec<StateId>>,
    pub stats: SolveStats,
    pub dfa: Dfa,
    pub costs: EdgeCostTable,
    pub queue: FrozenQueue,
    pub subproblems: Vec<Subproblem>,
}

impl TideResult {
    pub fn plan(&self) -> Option<&Plan> {
        self.outcome.as_ref().ok()
    }
}

/// Valuation lookup from DFA variables to domain atoms.
#[derive(Clone, Debug)]
pub struct Labels {
    atoms: Vec<usize>,
}

impl Labels {
    pub fn new(dfa: &Dfa, domain: &GroundDomain) -> Result<Self, DomainError> {
        Ok(Labels {
            atoms: domain.label_map(dfa.props())?,
        })
    }

    /// DFA successor of `q` after reading the label of `s`.
    pub fn step(&self, dfa: &Dfa, q: StateId, s: &WorldStateBits) -> StateId {
        dfa.step(q, |v| s.contains(self.atoms[v as usize]))
    }
}

/// Whether the label word of executing `plan` from `start` is accepted by
/// `dfa` and satisfies `goal`.
pub fn plan_satisfies(
    domain: &GroundDomain,
    start: &WorldStateBits,
    plan: &Plan,
    dfa: &Dfa,
    goal: &Formula,
) -> bool {
    let Ok(states) = plan.replay(domain, start) else {
        return false;
    };
    let word: Vec<_> = states.iter().map(|s| domain.world(s)).collect();
    let Ok(trace) = Trace::new(word.clone()) else {
        return false;
    };
    dfa.accepts(&word) && evaluate(&trace, goal)
}

/// Searches for a plan from `start` whose execution satisfies `goal`.
pub fn solve(
    domain: Arc<GroundDomain>,
    start: &WorldStateBits,
    goal: &Formula,
    cfg: &TideConfig,
) -> Result<TideResult, TideError> {
    let t0 = Instant::now();
    let dfa = translate(goal, cfg.state_cap)?;
    let labels = Labels::new(&dfa, &domain)?;
    let mut stats = SolveStats {
        translation_time: t0.elapsed(),
        dfa_states: dfa.state_count(),
        ..SolveStats::default()
    };
    let t1 = Instant::now();
    let mut costs = EdgeCostTable::from_dfa(&dfa);
    let mut queue = FrozenQueue::new(dfa.initial());
    let mut cache = PrefixCache::default();
    let mut subproblems = Vec::new();
    let result = |outcome, trace, stats: SolveStats, costs, queue, subproblems| TideResult {
        outcome,
        trace,
        stats,
        dfa: dfa.clone(),
        costs,
        queue,
        subproblems,
    };

    let empty = Plan::default();
    if plan_satisfies(&domain, start, &empty, &dfa, goal) {
        stats.search_time = t1.elapsed();
        let trace = Some(vec![dfa.initial()]);
        return Ok(result(Ok(empty), trace, stats, costs, queue, subproblems));
    }

    let ctx = RealizeContext {
        dfa: &dfa,
        labels: &labels,
        domain: &domain,
        start,
        cfg,
    };
    let mut capped = true;
    for _ in 0..cfg.max_realizations {
        let Some(trace) = generate_dfa_trace(&dfa, &costs, &mut queue, cfg) else {
            capped = false;
            break;
        };
        debug!("selected trace {:?}", trace.states);
        stats.realizations += 1;
        let mut r = match cfg.mode {
            RealizationMode::BfsHierarchical => realize_with_bfs(&ctx, &trace.states),
            RealizationMode::Planner(_) => {
                let rec = cfg.record_subproblems.then_some(&mut subproblems);
                realize_with_planner(&ctx, &trace.states, &mut cache, rec)?
            }
        };
        stats.solver_calls += r.solver_calls;
        stats.cache_hits += r.cache_hits;
        stats.unintended_transitions += r.unintended;
        stats.expanded += r.expanded;
        let valid = match &r.outcome {
            Ok(plan) => plan_satisfies(&domain, start, plan, &dfa, goal),
            Err(_) => true,
        };
        if !valid {
            debug!("plan for {:?} failed validation", trace.states);
            r.outcome = Err(Failure {
                step: trace.edge_count() - 1,
                exhaustive: false,
                retry: false,
            });
        }
        apply_feedback(&mut costs, &mut queue, &trace.states, &r, cfg);
        match r.outcome {
            Ok(plan) => {
                if cfg.record_subproblems && cfg.mode == RealizationMode::BfsHierarchical {
                    subproblems.extend(subproblem::along_plan(&ctx, &trace.states, &plan)?);
                }
                stats.search_time = t1.elapsed();
                return Ok(result(Ok(plan), Some(trace.states), stats, costs, queue, subproblems));
            }
            Err(f) => {
                debug!("trace {:?} failed at step {} (exhaustive: {})", trace.states, f.step, f.exhaustive);
                stats.backtracking_steps += 1;
            }
        }
    }
    stats.search_time = t1.elapsed();
    let why = if capped {
        NoPlan::AttemptLimit
    } else if queue.is_empty() {
        NoPlan::Proven
    } else {
        NoPlan::Inconclusive
    };
    Ok(result(Err(why), None, stats, costs, queue, subproblems))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::ltlf::parse;

    fn run(goal: &str, mode: RealizationMode) -> TideResult {
        let d = blocks(3);
        let s = on_table(&d, 3);
        let cfg = TideConfig {
            mode,
            ..TideConfig::default()
        };
        solve(d, &s, &parse(goal).unwrap(), &cfg).unwrap()
    }

    const MODES: [RealizationMode; 3] = [
        RealizationMode::BfsHierarchical,
        RealizationMode::Planner(PlannerSolver::Bfs),
        RealizationMode::Planner(PlannerSolver::Astar),
    ];

    #[test]
    fn problem_one_in_every_mode() {
        for mode in MODES {
            let r = run("F(on_b2_b1 & X(F(on_b3_b2)))", mode);
            let plan = r.plan().unwrap();
            assert_eq!(plan.len(), 4, "{mode:?}");
            assert_eq!(r.trace.as_deref(), Some(&[0, 1, 2][..]));
        }
    }

    #[test]
    fn problem_two_uses_the_constraint() {
        for mode in MODES {
            let r = run("F(on_b2_b1 & X(on_b2_b1 U on_b3_b2))", mode);
            assert_eq!(r.plan().unwrap().len(), 4, "{mode:?}");
        }
    }

    #[test]
    fn problem_three_is_unrealizable_in_blocksworld() {
        for mode in MODES {
            let r = run("F(on_b2_b1) & G(!on_b2_b1 | X(on_b3_b2))", mode);
            assert_eq!(r.outcome, Err(NoPlan::Proven), "{mode:?}");
        }
    }

    #[test]
    fn false_goal_has_no_plan() {
        for mode in MODES {
            let r = run("false", mode);
            assert_eq!(r.outcome, Err(NoPlan::Proven));
            assert!(r.queue.is_empty());
            assert_eq!(r.stats.realizations, 0);
        }
    }

    #[test]
    fn goal_already_met_gives_empty_plan() {
        let r = run("G(!holding_b1)", RealizationMode::BfsHierarchical);
        assert_eq!(r.plan().unwrap().len(), 0);
        let r = run("ontable_b1", RealizationMode::BfsHierarchical);
        assert_eq!(r.plan().unwrap().len(), 0);
    }

    #[test]
    fn unknown_atoms_are_rejected() {
        let d = blocks(2);
        let s = on_table(&d, 2);
        let e = solve(d, &s, &parse("F(on_b9_b1)").unwrap(), &TideConfig::default());
        assert!(matches!(e, Err(TideError::Domain(DomainError::UnknownAtom(_)))));
    }

    #[test]
    fn tower_reversal_three() {
        let asc = "ontable_b1 & on_b2_b1 & on_b3_b2";
        let desc = "ontable_b3 & on_b2_b3 & on_b1_b2";
        let r = run(&format!("F({asc} & X(F({desc})))"), RealizationMode::BfsHierarchical);
        assert_eq!(r.plan().unwrap().len(), 10);
    }

    #[test]
    fn case_four_falls_back_to_case_three() {
        let d = switches();
        let s = d.state(&["a"].into_iter().collect()).unwrap();
        let goal = parse("F(a) & G(!a | X(b))").unwrap();
        for mode in MODES {
            let cfg = TideConfig {
                mode,
                record_subproblems: true,
                ..TideConfig::default()
            };
            let r = solve(d.clone(), &s, &goal, &cfg).unwrap();
            let plan = r.plan().unwrap();
            assert_eq!(plan.to_text(&d), "(set-b)\n(drop-a)\n", "{mode:?}");
            let cases: Vec<Case> = r.subproblems.iter().map(|p| p.case).collect();
            assert_eq!(cases[0], Case::Case1);
            assert!(cases.contains(&Case::Case4));
        }
    }
}
