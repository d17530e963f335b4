use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use super::cache::PrefixCache;
use super::subproblem::{create_subproblem, Case, Subproblem};
use super::{Labels, PlannerSolver, RealizationMode, TideConfig, TideError};
use crate::automaton::{Dfa, StateId};
use crate::domain::{GroundDomain, GroundProblem, WorldStateBits};
use crate::reach_avoid::{solve_astar, solve_bfs, solve_one_step, Plan, SolveOutcome, SolveReport};

/// Shared, read-only inputs of a realization attempt.
pub struct RealizeContext<'a> {
    pub dfa: &'a Dfa,
    pub labels: &'a Labels,
    pub domain: &'a Arc<GroundDomain>,
    pub start: &'a WorldStateBits,
    pub cfg: &'a TideConfig,
}

/// Where and how a realization attempt failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Failure {
    /// Index of the failed edge `trace[step] -> trace[step + 1]`.
    pub step: usize,
    /// No execution of the prefix up to and including the failed edge exists.
    pub exhaustive: bool,
    /// The trace may succeed on a later attempt because the cache grew.
    pub retry: bool,
}

#[derive(Clone, Debug)]
pub struct Realization {
    pub outcome: Result<Plan, Failure>,
    /// DFA edges taken by some explored execution.
    pub realized: Vec<(StateId, StateId)>,
    pub solver_calls: usize,
    pub cache_hits: usize,
    pub unintended: usize,
    pub expanded: usize,
}

struct ProductNode {
    state: WorldStateBits,
    parent: usize,
    action: usize,
}

fn extract(nodes: &[ProductNode], mut i: usize) -> Plan {
    let mut steps = Vec::new();
    while nodes[i].parent != usize::MAX {
        steps.push(nodes[i].action);
        i = nodes[i].parent;
    }
    steps.reverse();
    Plan::new(steps)
}

/// Breadth-first search over pairs of world state and trace position.
///
/// The deepest non-empty position is always expanded first, so each
/// transition is reached by a shortest continuation of the first execution
/// that entered the preceding position. Successors that leave the trace are
/// counted as unintended and skipped.
pub fn realize_with_bfs(ctx: &RealizeContext<'_>, trace: &[StateId]) -> Realization {
    let k = trace.len() - 1;
    let mut unintended_edges = BTreeSet::new();
    let mut unintended = 0;
    let mut expanded = 0;
    let finish = |outcome: Result<Plan, Failure>, deepest: usize, extra: &BTreeSet<(StateId, StateId)>, unintended, expanded| {
        let mut realized: Vec<_> = trace.windows(2).take(deepest).map(|w| (w[0], w[1])).collect();
        realized.extend(extra.iter().copied());
        Realization {
            outcome,
            realized,
            solver_calls: 1,
            cache_hits: 0,
            unintended,
            expanded,
        }
    };
    let fail = |step, exhaustive| Err(Failure { step, exhaustive, retry: false });

    let q = ctx.labels.step(ctx.dfa, trace[0], ctx.start);
    let level = if q == trace[0] {
        0
    } else if k >= 1 && q == trace[1] {
        1
    } else {
        unintended_edges.insert((trace[0], q));
        return finish(fail(0, true), 0, &unintended_edges, 1, 0);
    };
    if level == k {
        return finish(Ok(Plan::default()), k, &unintended_edges, 0, 0);
    }
    let mut nodes = vec![ProductNode {
        state: ctx.start.clone(),
        parent: usize::MAX,
        action: 0,
    }];
    let mut visited: HashSet<(WorldStateBits, usize)> = HashSet::new();
    visited.insert((ctx.start.clone(), level));
    let mut queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); k];
    queues[level].push_back(0);
    let mut deepest = level;

    while let Some(i) = (0..k).rev().find(|&l| !queues[l].is_empty()) {
        let n = queues[i].pop_front().expect("non-empty level");
        expanded += 1;
        let q = trace[i];
        let s = nodes[n].state.clone();
        for (a, next) in ctx.domain.successors(&s) {
            let q2 = ctx.labels.step(ctx.dfa, q, &next);
            let lvl = if q2 == q {
                i
            } else if q2 == trace[i + 1] {
                i + 1
            } else {
                unintended += 1;
                unintended_edges.insert((q, q2));
                if unintended > ctx.cfg.unintended_transition_cap {
                    return finish(fail(deepest, false), deepest, &unintended_edges, unintended, expanded);
                }
                continue;
            };
            if !visited.insert((next.clone(), lvl)) {
                continue;
            }
            if nodes.len() >= ctx.cfg.node_budget {
                return finish(fail(deepest, false), deepest, &unintended_edges, unintended, expanded);
            }
            nodes.push(ProductNode {
                state: next,
                parent: n,
                action: a,
            });
            if lvl == k {
                let plan = extract(&nodes, nodes.len() - 1);
                return finish(Ok(plan), k, &unintended_edges, unintended, expanded);
            }
            deepest = deepest.max(lvl);
            queues[lvl].push_back(nodes.len() - 1);
        }
    }
    finish(fail(deepest, true), deepest, &unintended_edges, unintended, expanded)
}

/// Whether executing `plan` from `s` keeps the automaton in `source` and
/// then moves it to `target` on the last state.
fn takes_transition(
    ctx: &RealizeContext<'_>,
    source: StateId,
    target: StateId,
    s: &WorldStateBits,
    plan: &Plan,
    fresh: bool,
) -> Option<WorldStateBits> {
    let states = plan.replay(ctx.domain, s).ok()?;
    let read = if fresh { &states[..] } else { &states[1..] };
    let (last, before) = read.split_last()?;
    if before.iter().any(|x| ctx.labels.step(ctx.dfa, source, x) != source) {
        return None;
    }
    (ctx.labels.step(ctx.dfa, source, last) == target).then(|| states.last().expect("non-empty").clone())
}

struct Counters {
    calls: usize,
    expanded: usize,
}

fn classical(ctx: &RealizeContext<'_>, p: &GroundProblem, n: &mut Counters) -> Result<SolveReport, TideError> {
    n.calls += 1;
    let r = match ctx.cfg.mode {
        RealizationMode::Planner(PlannerSolver::Astar) => solve_astar(p, ctx.cfg.node_budget)?,
        _ => solve_bfs(p, ctx.cfg.node_budget)?,
    };
    n.expanded += r.expanded;
    Ok(r)
}

/// A plan, or whether the failure was exhaustive.
fn as_attempt(r: SolveReport) -> Result<Plan, bool> {
    match r.outcome {
        SolveOutcome::Plan(p) => Ok(p),
        SolveOutcome::Exhausted => Err(true),
        SolveOutcome::NodeBudgetHit => Err(false),
    }
}

fn solve_step(
    ctx: &RealizeContext<'_>,
    sub: &Subproblem,
    n: &mut Counters,
    record: &mut Option<&mut Vec<Subproblem>>,
) -> Result<Result<Plan, bool>, TideError> {
    let current = &sub.problem.start;
    let zero_step = || -> Result<Result<Plan, bool>, TideError> {
        let g = ctx.domain.compile(&sub.edge_goal)?;
        Ok(if g.holds(current) { Ok(Plan::default()) } else { Err(true) })
    };
    match sub.case {
        Case::Case1 | Case::Case3 => Ok(as_attempt(classical(ctx, &sub.problem, n)?)),
        Case::Case2 | Case::Case4 if sub.fresh => zero_step(),
        Case::Case2 => {
            n.calls += 1;
            Ok(as_attempt(solve_one_step(&sub.problem)?))
        }
        Case::Case4 => {
            let mut direct = sub.problem.clone();
            direct.goal = sub.edge_goal.clone();
            n.calls += 1;
            if let Some(p) = solve_one_step(&direct)?.plan() {
                return Ok(Ok(p.clone()));
            }
            let self_goal = ctx
                .domain
                .compile(sub.self_goal.as_ref().expect("case 4 has a self-edge"))?;
            let mut exhaustive = true;
            for (a, next) in ctx.domain.successors(current) {
                if !self_goal.holds(&next) {
                    continue;
                }
                let inner = create_subproblem(ctx.dfa, ctx.domain, sub.source, sub.target, &next, false)?;
                debug_assert_eq!(inner.case, Case::Case3);
                if let Some(r) = record.as_deref_mut() {
                    r.push(inner.clone());
                }
                match as_attempt(classical(ctx, &inner.problem, n)?) {
                    Ok(p) => {
                        let mut plan = Plan::new(vec![a]);
                        plan.concat(&p);
                        return Ok(Ok(plan));
                    }
                    Err(e) => exhaustive &= e,
                }
            }
            Ok(Err(exhaustive))
        }
    }
}

/// Realizes `trace` one transition at a time with a classical solver,
/// starting from the longest cached prefix.
///
/// An exhaustive failure beyond the first transition is confirmed by a
/// product search over the failed prefix, since the subplans chosen for
/// earlier transitions may not be the only ones.
pub fn realize_with_planner(
    ctx: &RealizeContext<'_>,
    trace: &[StateId],
    cache: &mut PrefixCache,
    mut record: Option<&mut Vec<Subproblem>>,
) -> Result<Realization, TideError> {
    let k = trace.len() - 1;
    let mut n = Counters { calls: 0, expanded: 0 };
    let mut cache_hits = 0;
    let mut unintended = 0;
    let cached = if ctx.cfg.caching { cache.longest(trace) } else { None };
    let (mut step, mut plan, mut s) = match cached {
        Some((j, p, end)) => {
            cache_hits += 1;
            (j, p.clone(), end.clone())
        }
        None => (0, Plan::default(), ctx.start.clone()),
    };
    let mut realized: Vec<(StateId, StateId)> = trace.windows(2).take(step).map(|w| (w[0], w[1])).collect();
    let done = |outcome, realized, n: Counters, cache_hits, unintended| Realization {
        outcome,
        realized,
        solver_calls: n.calls,
        cache_hits,
        unintended,
        expanded: n.expanded,
    };

    while step < k {
        let fresh = step == 0;
        let sub = create_subproblem(ctx.dfa, ctx.domain, trace[step], trace[step + 1], &s, fresh)?;
        if let Some(r) = record.as_deref_mut() {
            r.push(sub.clone());
        }
        let attempt = solve_step(ctx, &sub, &mut n, &mut record)?;
        let mut failure = Failure {
            step,
            exhaustive: false,
            retry: false,
        };
        match attempt {
            Ok(p) => {
                if let Some(end) = takes_transition(ctx, trace[step], trace[step + 1], &s, &p, fresh) {
                    s = end;
                    plan.concat(&p);
                    realized.push((trace[step], trace[step + 1]));
                    step += 1;
                    if ctx.cfg.caching {
                        cache.insert(trace[..=step].to_vec(), plan.clone(), s.clone());
                    }
                    continue;
                }
            }
            Err(exhaustive) => failure.exhaustive = exhaustive,
        }
        if failure.exhaustive && step > 0 {
            let r = realize_with_bfs(ctx, &trace[..=step + 1]);
            n.calls += 1;
            n.expanded += r.expanded;
            unintended += r.unintended;
            for e in r.realized {
                if !realized.contains(&e) {
                    realized.push(e);
                }
            }
            match r.outcome {
                Err(f) if f.exhaustive => failure.step = f.step,
                Ok(prefix) => {
                    failure.exhaustive = false;
                    if ctx.cfg.caching {
                        let end = prefix
                            .replay(ctx.domain, ctx.start)
                            .expect("product search returns executable plans")
                            .pop()
                            .expect("non-empty");
                        cache.insert(trace[..=step + 1].to_vec(), prefix, end);
                        failure.retry = true;
                    }
                }
                Err(_) => failure.exhaustive = false,
            }
        }
        return Ok(done(Err(failure), realized, n, cache_hits, unintended));
    }
    Ok(done(Ok(plan), realized, n, cache_hits, unintended))
}
