use std::fmt;
use std::sync::Arc;

use super::realize::RealizeContext;
use super::TideError;
use crate::automaton::{Dfa, StateId};
use crate::bdd::{BddError, GoalExpression};
use crate::domain::{GroundDomain, GroundProblem, WorldStateBits};
use crate::reach_avoid::Plan;

/// How the self-edge of the source state shapes a subproblem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// Edge and self-edge together cover every label: no constraint.
    Case1,
    /// No self-edge: the transition must happen in one step.
    Case2,
    /// The current state satisfies the self-edge: it becomes the constraint.
    Case3,
    /// The current state violates the self-edge: one step towards edge or
    /// self-edge, then continue as in case 3.
    Case4,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::Case1 => "case1",
            Case::Case2 => "case2",
            Case::Case3 => "case3",
            Case::Case4 => "case4",
        };
        f.write_str(s)
    }
}

/// A reach-avoid problem for one DFA transition.
#[derive(Clone, Debug)]
pub struct Subproblem {
    /// Goal is the edge guard, or in case 4 the extended goal.
    pub problem: GroundProblem,
    pub case: Case,
    pub source: StateId,
    pub target: StateId,
    pub edge_goal: GoalExpression,
    pub self_goal: Option<GoalExpression>,
    /// The label of the start state has not been read by the automaton yet.
    pub fresh: bool,
}

fn guard_goal(
    g: &Result<GoalExpression, BddError>,
    source: StateId,
    target: StateId,
) -> Result<GoalExpression, TideError> {
    match g {
        Ok(g) => Ok(g.clone()),
        Err(BddError::Unsatisfiable) => Err(TideError::DeadEdge(source, target)),
        Err(e) => Err(TideError::Bdd(e.clone())),
    }
}

/// Builds the subproblem for `source -> target` from `current`.
pub fn create_subproblem(
    dfa: &Dfa,
    domain: &Arc<GroundDomain>,
    source: StateId,
    target: StateId,
    current: &WorldStateBits,
    fresh: bool,
) -> Result<Subproblem, TideError> {
    let edge = dfa
        .edge(source, target)
        .filter(|_| source != target)
        .ok_or(crate::automaton::DfaError::NoSuchEdge(source, target))?;
    let edge_goal = guard_goal(&edge.goal, source, target)?;
    let self_goal = match dfa.self_edge(source) {
        Some(s) => Some(guard_goal(&s.goal, source, source)?),
        None => None,
    };
    let (case, goal, constraint) = match &self_goal {
        _ if edge.covers_all => (Case::Case1, edge_goal.clone(), GoalExpression::top()),
        None => (Case::Case2, edge_goal.clone(), GoalExpression::top()),
        Some(sg) if domain.compile(sg)?.holds(current) => (Case::Case3, edge_goal.clone(), sg.clone()),
        Some(_) => {
            let ext = edge
                .extended_goal
                .as_ref()
                .expect("sources with a self-edge carry an extended goal");
            (Case::Case4, guard_goal(ext, source, target)?, GoalExpression::top())
        }
    };
    let mut problem = GroundProblem::new(domain.clone(), current.clone(), goal, constraint);
    problem.allow_empty_plan = fresh;
    Ok(Subproblem {
        problem,
        case,
        source,
        target,
        edge_goal,
        self_goal,
        fresh,
    })
}

/// The subproblems met along a realized `plan` of `trace`, each started
/// from the state where the previous transition was taken.
pub(crate) fn along_plan(
    ctx: &RealizeContext<'_>,
    trace: &[StateId],
    plan: &Plan,
) -> Result<Vec<Subproblem>, TideError> {
    let states = plan
        .replay(ctx.domain, ctx.start)
        .map_err(|e| TideError::Domain(crate::domain::DomainError::NotApplicable(e.to_string())))?;
    let mut out = Vec::new();
    let mut level = 0;
    let mut boundary = 0;
    let mut q = trace[0];
    for (j, s) in states.iter().enumerate() {
        if level + 1 >= trace.len() {
            break;
        }
        q = ctx.labels.step(ctx.dfa, q, s);
        if q == trace[level + 1] {
            out.push(create_subproblem(
                ctx.dfa,
                ctx.domain,
                trace[level],
                trace[level + 1],
                &states[boundary],
                level == 0,
            )?);
            level += 1;
            boundary = j;
        }
    }
    Ok(out)
}
