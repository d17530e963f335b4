//! Deterministic finite automata with BDD-guarded edges.
//!
//! Every state lists at most one edge per target; the guards leaving a state
//! are pairwise disjoint and cover every assignment. Per-edge guard analysis
//! (required literals, extracted goal expressions) is computed once at
//! construction so a [`Dfa`] can be shared read-only afterwards.

mod cost;
mod dot;
mod minimize;
mod translate;

use std::collections::VecDeque;

use crate::bdd::{Bdd, BddError, BddRef, GoalExpression, Literal};
use crate::ltlf::{parse, Prop, WorldState};

pub use cost::{
    effective_cost, trace_rank, CandidateTrace, CostEntry, CostProvenance, EdgeCostTable,
    DEFAULT_CYCLE_COST,
};
pub use minimize::minimize;
pub use translate::{translate, translate_unminimized, TranslateError, DEFAULT_STATE_CAP};

pub type StateId = usize;

/// One outgoing transition together with its guard analysis.
#[derive(Clone, Debug)]
pub struct Edge {
    pub target: StateId,
    pub guard: BddRef,
    /// Literals shared by every model of the guard.
    pub required: Vec<Literal>,
    /// The guard as a goal expression.
    pub goal: Result<GoalExpression, BddError>,
    /// Goal expression of `guard ∨ self-guard`; `None` for self-edges and for
    /// sources without a self-edge.
    pub extended_goal: Option<Result<GoalExpression, BddError>>,
    /// Whether `guard ∨ self-guard` is valid.
    pub covers_all: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DfaError {
    #[error("an automaton needs at least one state")]
    NoStates,
    #[error("state {0} is out of range")]
    StateOutOfRange(StateId),
    #[error("guards leaving state {0} overlap")]
    Overlap(StateId),
    #[error("guards leaving state {0} do not cover every assignment")]
    Incomplete(StateId),
    #[error("{0} -> {1} is not an edge")]
    NoSuchEdge(StateId, StateId),
    #[error("edge costs are defined only between distinct states")]
    SelfEdge,
    #[error("guard `{text}` does not parse: {reason}")]
    BadGuard { text: String, reason: String },
    #[error(transparent)]
    Bdd(#[from] BddError),
}

/// A complete deterministic automaton over the propositions in its BDD store.
#[derive(Clone, Debug)]
pub struct Dfa {
    bdd: Bdd,
    initial: StateId,
    accepting: Vec<bool>,
    edges: Vec<Vec<Edge>>,
    coaccessible: Vec<bool>,
}

impl Dfa {
    /// Builds an automaton from raw `(target, guard)` lists. Parallel edges to
    /// the same target are merged and unsatisfiable guards dropped.
    pub fn from_parts(
        mut bdd: Bdd,
        initial: StateId,
        accepting: Vec<bool>,
        raw: Vec<Vec<(StateId, BddRef)>>,
    ) -> Result<Dfa, DfaError> {
        let n = accepting.len();
        if n == 0 || raw.len() != n {
            return Err(DfaError::NoStates);
        }
        if initial >= n {
            return Err(DfaError::StateOutOfRange(initial));
        }
        let mut merged: Vec<Vec<(StateId, BddRef)>> = Vec::with_capacity(n);
        for (q, out) in raw.into_iter().enumerate() {
            let mut m: Vec<(StateId, BddRef)> = Vec::new();
            for (t, g) in out {
                if t >= n {
                    return Err(DfaError::StateOutOfRange(t));
                }
                if g.is_false() {
                    continue;
                }
                match m.iter_mut().find(|(t2, _)| *t2 == t) {
                    Some(e) => e.1 = bdd.or(e.1, g),
                    None => m.push((t, g)),
                }
            }
            m.sort_by_key(|e| e.0);
            let mut cover = BddRef::FALSE;
            for &(_, g) in &m {
                if !bdd.and(cover, g).is_false() {
                    return Err(DfaError::Overlap(q));
                }
                cover = bdd.or(cover, g);
            }
            if !cover.is_true() {
                return Err(DfaError::Incomplete(q));
            }
            merged.push(m);
        }

        let mut edges = Vec::with_capacity(n);
        for (q, out) in merged.iter().enumerate() {
            let self_guard = out.iter().find(|e| e.0 == q).map(|e| e.1);
            let mut list = Vec::with_capacity(out.len());
            for &(t, g) in out {
                let required = bdd.required_literals(g)?;
                let goal = bdd.extract_goal(g);
                let (extended_goal, covers_all) = match self_guard {
                    Some(s) if t != q => {
                        let ext = bdd.or(g, s);
                        (Some(bdd.extract_goal(ext)), ext.is_true())
                    }
                    _ => (None, g.is_true()),
                };
                list.push(Edge {
                    target: t,
                    guard: g,
                    required,
                    goal,
                    extended_goal,
                    covers_all,
                });
            }
            edges.push(list);
        }
        let coaccessible = coaccessible_states(&accepting, &edges);
        Ok(Dfa {
            bdd,
            initial,
            accepting,
            edges,
            coaccessible,
        })
    }

    /// Convenience constructor taking guards as propositional formula text
    /// over `props` (registered in the given order).
    pub fn from_guards(
        props: &[&str],
        initial: StateId,
        accepting: &[StateId],
        n_states: usize,
        edges: &[(StateId, StateId, &str)],
    ) -> Result<Dfa, DfaError> {
        let mut bdd = Bdd::new();
        for p in props {
            let prop = Prop::new(p).map_err(|e| DfaError::BadGuard {
                text: p.to_string(),
                reason: e.to_string(),
            })?;
            bdd.register(&prop);
        }
        let mut raw = vec![Vec::new(); n_states];
        for &(s, t, text) in edges {
            if s >= n_states {
                return Err(DfaError::StateOutOfRange(s));
            }
            let f = parse(text).map_err(|e| DfaError::BadGuard {
                text: text.to_string(),
                reason: e.to_string(),
            })?;
            let g = bdd.from_propositional(&f)?;
            raw[s].push((t, g));
        }
        let mut acc = vec![false; n_states];
        for &q in accepting {
            if q >= n_states {
                return Err(DfaError::StateOutOfRange(q));
            }
            acc[q] = true;
        }
        Dfa::from_parts(bdd, initial, acc, raw)
    }

    pub fn bdd(&self) -> &Bdd {
        &self.bdd
    }

    pub fn props(&self) -> &[Prop] {
        self.bdd.props()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_count()).filter(|&q| self.accepting[q])
    }

    /// Whether some accepting state is reachable from `q`.
    pub fn is_coaccessible(&self, q: StateId) -> bool {
        self.coaccessible[q]
    }

    /// Outgoing edges of `q` (self-edge included), ordered by target.
    pub fn edges(&self, q: StateId) -> &[Edge] {
        &self.edges[q]
    }

    pub fn edge(&self, src: StateId, tgt: StateId) -> Option<&Edge> {
        self.edges[src].iter().find(|e| e.target == tgt)
    }

    pub fn self_edge(&self, q: StateId) -> Option<&Edge> {
        self.edge(q, q)
    }

    /// Successor of `q` when the propositions with `value(var) == true` hold.
    pub fn step(&self, q: StateId, value: impl Fn(u32) -> bool) -> StateId {
        for e in &self.edges[q] {
            if self.bdd.eval(e.guard, &value) {
                return e.target;
            }
        }
        unreachable!("guards of a complete automaton cover every assignment")
    }

    pub fn step_world(&self, q: StateId, w: &WorldState) -> StateId {
        let props = self.bdd.props();
        self.step(q, |v| w.contains(props[v as usize].as_str()))
    }

    /// State reached after reading all of `word`.
    pub fn run(&self, word: &[WorldState]) -> StateId {
        word.iter().fold(self.initial, |q, w| self.step_world(q, w))
    }

    pub fn accepts(&self, word: &[WorldState]) -> bool {
        self.accepting[self.run(word)]
    }

    /// Cost of `src -> tgt`: the required literals of its guard that the
    /// source's self-edge does not already require (all of them when there
    /// is no self-edge).
    pub fn edge_cost(&self, src: StateId, tgt: StateId) -> Result<usize, DfaError> {
        if src == tgt {
            return Err(DfaError::SelfEdge);
        }
        let e = self.edge(src, tgt).ok_or(DfaError::NoSuchEdge(src, tgt))?;
        Ok(match self.self_edge(src) {
            Some(s) => e.required.iter().filter(|l| !s.required.contains(l)).count(),
            None => e.required.len(),
        })
    }

    /// Readable form of a guard in this automaton's store.
    pub fn guard_text(&self, src: StateId, tgt: StateId) -> Option<String> {
        let e = self.edge(src, tgt)?;
        Some(match &e.goal {
            Ok(g) => g.to_string(),
            Err(_) => self.bdd.to_formula(e.guard).to_string(),
        })
    }
}

impl PartialEq for Dfa {
    /// Structural equality: same propositions, numbering, acceptance and
    /// guard functions.
    fn eq(&self, other: &Dfa) -> bool {
        if self.props() != other.props()
            || self.initial != other.initial
            || self.accepting != other.accepting
        {
            return false;
        }
        let mut scratch = self.bdd.clone();
        self.edges.iter().zip(&other.edges).all(|(a, b)| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| {
                    x.target == y.target && scratch.import(&other.bdd, y.guard) == x.guard
                })
        })
    }
}

fn coaccessible_states(accepting: &[bool], edges: &[Vec<Edge>]) -> Vec<bool> {
    let n = accepting.len();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (q, out) in edges.iter().enumerate() {
        for e in out {
            preds[e.target].push(q);
        }
    }
    let mut seen = accepting.to_vec();
    let mut queue: VecDeque<StateId> = (0..n).filter(|&q| accepting[q]).collect();
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if !seen[p] {
                seen[p] = true;
                queue.push_back(p);
            }
        }
    }
    seen
}


#[cfg(test)]
mod tests {
    use super::fixtures::cost_example;
    use super::*;

    fn ws(props: &[&str]) -> WorldState {
        props.iter().copied().collect()
    }

    #[test]
    fn cost_example_edge_costs() {
        let d = cost_example();
        assert_eq!(d.edge_cost(0, 2).unwrap(), 1);
        assert_eq!(d.edge_cost(0, 1).unwrap(), 1);
        assert_eq!(d.edge_cost(2, 3).unwrap(), 1);
        assert_eq!(d.edge_cost(0, 3).unwrap(), 2);
        assert_eq!(d.edge_cost(0, 0), Err(DfaError::SelfEdge));
        assert_eq!(d.edge_cost(1, 3), Err(DfaError::NoSuchEdge(1, 3)));
        assert_eq!(
            d.edge(0, 2).unwrap().required,
            vec![Literal::pos("c1"), Literal::neg("g"), Literal::neg("h")]
        );
        assert!(d.is_coaccessible(0));
        assert!(!d.is_coaccessible(1));
        assert!(!d.is_coaccessible(4));
    }

    #[test]
    fn cost_without_self_edge_counts_all_required() {
        let d = Dfa::from_guards(
            &["c1", "g"],
            0,
            &[1],
            3,
            &[
                (0, 1, "c1 & !g"),
                (0, 2, "!(c1 & !g)"),
                (1, 1, "true"),
                (2, 2, "true"),
            ],
        )
        .unwrap();
        assert_eq!(d.edge_cost(0, 1).unwrap(), 2);
    }

    #[test]
    fn cost_is_zero_when_self_edge_requires_the_same() {
        let d = Dfa::from_guards(
            &["p", "q"],
            0,
            &[1],
            2,
            &[(0, 0, "p & !q"), (0, 1, "!(p & !q)"), (1, 1, "true")],
        )
        .unwrap();
        // the edge guard `!p | q` has no required literals
        assert_eq!(d.edge_cost(0, 1).unwrap(), 0);
    }

    #[test]
    fn rejects_malformed_automata() {
        assert_eq!(
            Dfa::from_guards(&["p"], 0, &[], 1, &[(0, 0, "p")]).unwrap_err(),
            DfaError::Incomplete(0)
        );
        assert_eq!(
            Dfa::from_guards(&["p"], 0, &[], 1, &[(0, 0, "true"), (0, 0, "p")]).unwrap(),
            Dfa::from_guards(&["p"], 0, &[], 1, &[(0, 0, "true")]).unwrap()
        );
        assert_eq!(
            Dfa::from_guards(&["p"], 0, &[], 2, &[(0, 0, "true"), (0, 1, "p"), (1, 1, "true")])
                .unwrap_err(),
            DfaError::Overlap(0)
        );
        assert!(matches!(
            Dfa::from_guards(&["p"], 0, &[], 1, &[(0, 0, "p &")]),
            Err(DfaError::BadGuard { .. })
        ));
    }

    #[test]
    fn run_and_accept() {
        let d = Dfa::from_guards(
            &["on_b2_b1", "on_b3_b2"],
            0,
            &[2],
            3,
            &[
                (0, 0, "!on_b2_b1"),
                (0, 1, "on_b2_b1"),
                (1, 1, "!on_b3_b2"),
                (1, 2, "on_b3_b2"),
                (2, 2, "true"),
            ],
        )
        .unwrap();
        assert!(d.accepts(&[ws(&[]), ws(&["on_b2_b1"]), ws(&["on_b2_b1", "on_b3_b2"])]));
        assert!(!d.accepts(&[ws(&["on_b3_b2"])]));
        assert!(!d.accepts(&[]));
    }
}
