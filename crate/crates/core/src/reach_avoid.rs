//! Classical solvers for planning problems with propositional reach-avoid goals.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use thiserror::Error;

use crate::domain::{CompiledGoal, DomainError, GroundDomain, GroundProblem, WorldStateBits};

pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

/// A sequence of ground action indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    pub steps: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanViolation {
    #[error("step {step}: {action} is not applicable")]
    NotApplicable { step: usize, action: String },
    #[error("state {step} violates the constraint")]
    Constraint { step: usize },
    #[error("final state does not satisfy the goal")]
    Goal,
    #[error("empty plan is not allowed")]
    Empty,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl Plan {
    pub fn new(steps: Vec<usize>) -> Self {
        Plan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn concat(&mut self, other: &Plan) {
        self.steps.extend_from_slice(&other.steps);
    }

    /// One `(action args)` per line.
    pub fn to_text(&self, d: &GroundDomain) -> String {
        self.steps
            .iter()
            .map(|&a| format!("{}\n", d.actions[a]))
            .collect()
    }

    /// Reads a plan in the format of [`Plan::to_text`]; blank lines and `;`
    /// comments are ignored.
    pub fn parse(d: &GroundDomain, text: &str) -> Result<Plan, DomainError> {
        let mut steps = Vec::new();
        for line in text.lines() {
            let line = line.split(';').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let a = d
                .action_by_text(line)
                .ok_or_else(|| DomainError::UnknownAction(line.to_string()))?;
            steps.push(a);
        }
        Ok(Plan { steps })
    }

    /// The execution `s0, s1, ..., sn` from `start`.
    pub fn replay(&self, d: &GroundDomain, start: &WorldStateBits) -> Result<Vec<WorldStateBits>, PlanViolation> {
        let mut states = vec![start.clone()];
        for (i, &a) in self.steps.iter().enumerate() {
            let s = states.last().expect("non-empty");
            if !d.applicable(s, a) {
                return Err(PlanViolation::NotApplicable {
                    step: i + 1,
                    action: d.actions[a].to_string(),
                });
            }
            let next = d.apply(s, a);
            states.push(next);
        }
        Ok(states)
    }

    /// Checks applicability, the constraint on `s0..s(n-1)` and the goal on `sn`.
    pub fn validate(&self, p: &GroundProblem) -> Result<(), PlanViolation> {
        let d = &p.domain;
        if self.is_empty() && !p.allow_empty_plan {
            return Err(PlanViolation::Empty);
        }
        let states = self.replay(d, &p.start)?;
        let constraint = d.compile(&p.constraint)?;
        let goal = d.compile(&p.goal)?;
        for (i, s) in states[..states.len() - 1].iter().enumerate() {
            if !constraint.holds(s) {
                return Err(PlanViolation::Constraint { step: i });
            }
        }
        if !goal.holds(states.last().expect("non-empty")) {
            return Err(PlanViolation::Goal);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Plan(Plan),
    /// The constrained reachable space was closed without reaching the goal.
    Exhausted,
    NodeBudgetHit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub expanded: usize,
    pub generated: usize,
}

impl SolveReport {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.outcome {
            SolveOutcome::Plan(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.outcome == SolveOutcome::Exhausted
    }
}

struct Compiled {
    goal: CompiledGoal,
    constraint: CompiledGoal,
}

fn compile(p: &GroundProblem) -> Result<Compiled, DomainError> {
    Ok(Compiled {
        goal: p.domain.compile(&p.goal)?,
        constraint: p.domain.compile(&p.constraint)?,
    })
}

struct Node {
    parent: usize,
    action: usize,
}

fn extract(nodes: &[Node], mut i: usize) -> Plan {
    let mut steps = Vec::new();
    while i != 0 {
        steps.push(nodes[i].action);
        i = nodes[i].parent;
    }
    steps.reverse();
    Plan { steps }
}

fn report(outcome: SolveOutcome, expanded: usize, generated: usize) -> SolveReport {
    SolveReport {
        outcome,
        expanded,
        generated,
    }
}

/// Breadth-first search for a shortest plan.
pub fn solve_bfs(p: &GroundProblem, budget: usize) -> Result<SolveReport, DomainError> {
    let c = compile(p)?;
    let d = &p.domain;
    if p.allow_empty_plan && c.goal.holds(&p.start) {
        return Ok(report(SolveOutcome::Plan(Plan::default()), 0, 1));
    }
    let mut nodes = vec![Node { parent: 0, action: 0 }];
    let mut states = vec![p.start.clone()];
    let mut seen: HashMap<WorldStateBits, usize> = HashMap::new();
    seen.insert(p.start.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let (mut expanded, mut generated) = (0, 1);
    while let Some(i) = queue.pop_front() {
        if !c.constraint.holds(&states[i]) {
            continue;
        }
        expanded += 1;
        let s = states[i].clone();
        for (a, next) in d.successors(&s) {
            generated += 1;
            if c.goal.holds(&next) {
                nodes.push(Node { parent: i, action: a });
                return Ok(report(SolveOutcome::Plan(extract(&nodes, nodes.len() - 1)), expanded, generated));
            }
            if let Entry::Vacant(v) = seen.entry(next) {
                if nodes.len() >= budget {
                    return Ok(report(SolveOutcome::NodeBudgetHit, expanded, generated));
                }
                let k = nodes.len();
                nodes.push(Node { parent: i, action: a });
                states.push(v.key().clone());
                v.insert(k);
                queue.push_back(k);
            }
        }
    }
    Ok(report(SolveOutcome::Exhausted, expanded, generated))
}

/// Best-first search on `g + h`, with `h` the number of unsatisfied goal
/// literals. Equal `f` values are expanded in insertion order.
pub fn solve_astar(p: &GroundProblem, budget: usize) -> Result<SolveReport, DomainError> {
    let c = compile(p)?;
    let d = &p.domain;
    let mut nodes = vec![Node { parent: 0, action: 0 }];
    let mut states = vec![p.start.clone()];
    let mut g = vec![0usize];
    let mut best: HashMap<WorldStateBits, usize> = HashMap::new();
    if p.allow_empty_plan {
        best.insert(p.start.clone(), 0);
    }
    let mut open = BinaryHeap::new();
    open.push(Reverse((c.goal.unsatisfied(&p.start), 0usize, 0usize)));
    let mut seq = 1;
    let (mut expanded, mut generated) = (0, 1);
    while let Some(Reverse((_, _, i))) = open.pop() {
        let s = states[i].clone();
        if best.get(&s).is_some_and(|&b| b < g[i]) {
            continue;
        }
        if c.goal.holds(&s) && (i != 0 || p.allow_empty_plan) {
            return Ok(report(SolveOutcome::Plan(extract(&nodes, i)), expanded, generated));
        }
        if !c.constraint.holds(&s) {
            continue;
        }
        expanded += 1;
        let gn = g[i] + 1;
        for (a, next) in d.successors(&s) {
            generated += 1;
            if best.get(&next).is_some_and(|&b| b <= gn) {
                continue;
            }
            if nodes.len() >= budget {
                return Ok(report(SolveOutcome::NodeBudgetHit, expanded, generated));
            }
            best.insert(next.clone(), gn);
            let k = nodes.len();
            let f = gn + c.goal.unsatisfied(&next);
            nodes.push(Node { parent: i, action: a });
            states.push(next);
            g.push(gn);
            open.push(Reverse((f, seq, k)));
            seq += 1;
        }
    }
    Ok(report(SolveOutcome::Exhausted, expanded, generated))
}

/// The first action, in grounding order, whose successor satisfies the goal.
/// Plans of any other length are never returned.
pub fn solve_one_step(p: &GroundProblem) -> Result<SolveReport, DomainError> {
    let goal = p.domain.compile(&p.goal)?;
    let mut generated = 1;
    for (a, next) in p.domain.successors(&p.start) {
        generated += 1;
        if goal.holds(&next) {
            return Ok(report(SolveOutcome::Plan(Plan::new(vec![a])), 1, generated));
        }
    }
    Ok(report(SolveOutcome::Exhausted, 1, generated))
}
