use std::collections::BTreeMap;

use super::{Dfa, StateId};

pub const DEFAULT_CYCLE_COST: f64 = 100.0;

/// Where an edge's current cost came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CostProvenance {
    Base,
    Success,
    Failure,
    Pruned,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct CostEntry {
    pub cost: f64,
    pub base: f64,
    pub provenance: CostProvenance,
}

/// Current cost of every non-self edge of an automaton.
#[derive(Clone, Debug, Default)]
pub struct EdgeCostTable {
    entries: BTreeMap<(StateId, StateId), CostEntry>,
}

impl EdgeCostTable {
    /// Base costs of every non-self edge of `dfa`.
    pub fn from_dfa(dfa: &Dfa) -> Self {
        let mut entries = BTreeMap::new();
        for q in 0..dfa.state_count() {
            for e in dfa.edges(q) {
                if e.target == q {
                    continue;
                }
                let base = dfa.edge_cost(q, e.target).expect("non-self edge") as f64;
                entries.insert(
                    (q, e.target),
                    CostEntry {
                        cost: base,
                        base,
                        provenance: CostProvenance::Base,
                    },
                );
            }
        }
        EdgeCostTable { entries }
    }

    pub fn entry(&self, src: StateId, tgt: StateId) -> Option<&CostEntry> {
        self.entries.get(&(src, tgt))
    }

    /// Current cost; unknown edges cost nothing.
    pub fn cost(&self, src: StateId, tgt: StateId) -> f64 {
        self.entries.get(&(src, tgt)).map_or(0.0, |e| e.cost)
    }

    pub fn set(&mut self, src: StateId, tgt: StateId, cost: f64, provenance: CostProvenance) {
        let e = self.entries.entry((src, tgt)).or_insert(CostEntry {
            cost,
            base: cost,
            provenance: CostProvenance::Base,
        });
        e.cost = cost;
        e.provenance = provenance;
    }

    /// Multiplies every cost (current and base) by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for e in self.entries.values_mut() {
            e.cost *= factor;
            e.base *= factor;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(StateId, StateId), &CostEntry)> {
        self.entries.iter()
    }
}

/// A path from the initial state, never taking self-edges.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateTrace {
    pub states: Vec<StateId>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a trace without edges has no rank")]
pub struct EmptyTraceRank;

impl CandidateTrace {
    pub fn start(initial: StateId) -> Self {
        CandidateTrace {
            states: vec![initial],
            cost: 0.0,
        }
    }

    pub fn last(&self) -> StateId {
        *self.states.last().expect("traces are never empty")
    }

    pub fn edge_count(&self) -> usize {
        self.states.len() - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.states.windows(2).map(|w| (w[0], w[1]))
    }

    /// How often `q` already occurs in the trace.
    pub fn visits(&self, q: StateId) -> usize {
        self.states.iter().filter(|&&s| s == q).count()
    }

    /// The trace extended by `target`, with its effective cost added.
    pub fn extend(&self, target: StateId, costs: &EdgeCostTable, cycle_cost: f64) -> Self {
        let c = effective_cost(costs, self, (self.last(), target), cycle_cost);
        let mut states = self.states.clone();
        states.push(target);
        CandidateTrace {
            states,
            cost: self.cost + c,
        }
    }

    /// Recomputes the cumulative cost under the current table.
    pub fn recompute(&mut self, costs: &EdgeCostTable, cycle_cost: f64) {
        let mut t = CandidateTrace::start(self.states[0]);
        for &q in &self.states[1..] {
            t = t.extend(q, costs, cycle_cost);
        }
        self.cost = t.cost;
    }

    pub fn starts_with(&self, prefix: &[StateId]) -> bool {
        self.states.starts_with(prefix)
    }
}

/// Table cost of `edge` plus `CYCLE_COST` for every earlier visit of its
/// target in `trace`.
pub fn effective_cost(
    costs: &EdgeCostTable,
    trace: &CandidateTrace,
    edge: (StateId, StateId),
    cycle_cost: f64,
) -> f64 {
    costs.cost(edge.0, edge.1) + trace.visits(edge.1) as f64 * cycle_cost
}

/// Average cost per edge.
pub fn trace_rank(t: &CandidateTrace) -> Result<f64, EmptyTraceRank> {
    match t.edge_count() {
        0 => Err(EmptyTraceRank),
        n => Ok(t.cost / n as f64),
    }
}
