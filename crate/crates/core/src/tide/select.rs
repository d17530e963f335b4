use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::TideConfig;
use crate::automaton::{trace_rank, CandidateTrace, Dfa, EdgeCostTable, StateId};

#[derive(Clone, Debug)]
struct Queued {
    rank: f64,
    seq: u64,
    trace: CandidateTrace,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    /// Reversed so that the max-heap pops the lowest rank, oldest first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .rank
            .total_cmp(&self.rank)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn rank(t: &CandidateTrace) -> f64 {
    trace_rank(t).unwrap_or(0.0)
}

/// Candidate traces ordered by rank, kept across selection calls.
///
/// Retired traces stay queued and are re-ranked like any other, but are
/// never selected again.
#[derive(Clone, Debug)]
pub struct FrozenQueue {
    heap: BinaryHeap<Queued>,
    seq: u64,
    retired: HashSet<Vec<StateId>>,
    generation: u64,
}

impl FrozenQueue {
    /// A queue holding the edgeless trace at `initial`.
    pub fn new(initial: StateId) -> Self {
        let mut q = FrozenQueue {
            heap: BinaryHeap::new(),
            seq: 0,
            retired: HashSet::new(),
            generation: 0,
        };
        q.push(CandidateTrace::start(initial));
        q
    }

    pub fn push(&mut self, trace: CandidateTrace) {
        let seq = self.seq;
        self.seq += 1;
        self.heap.push(Queued {
            rank: rank(&trace),
            seq,
            trace,
        });
    }

    fn pop(&mut self) -> Option<Queued> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Queued traces, lowest rank first.
    pub fn traces(&self) -> Vec<&CandidateTrace> {
        let mut v: Vec<&Queued> = self.heap.iter().collect();
        v.sort_by(|a, b| b.cmp(a));
        v.into_iter().map(|q| &q.trace).collect()
    }

    pub fn contains(&self, states: &[StateId]) -> bool {
        self.heap.iter().any(|q| q.trace.states == states)
    }

    /// Number of re-rankings so far.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn retire(&mut self, states: &[StateId]) {
        self.retired.insert(states.to_vec());
    }

    pub fn is_retired(&self, states: &[StateId]) -> bool {
        self.retired.contains(states)
    }

    /// Recomputes every queued trace's cost under `costs`.
    pub fn rerank(&mut self, costs: &EdgeCostTable, cycle_cost: f64) {
        let entries = std::mem::take(&mut self.heap).into_vec();
        self.heap = entries
            .into_iter()
            .map(|mut q| {
                q.trace.recompute(costs, cycle_cost);
                q.rank = rank(&q.trace);
                q
            })
            .collect();
        self.generation += 1;
    }

    /// Drops every queued trace that starts with `prefix`; returns how many.
    pub fn prune(&mut self, prefix: &[StateId]) -> usize {
        let before = self.heap.len();
        self.heap.retain(|q| !q.trace.starts_with(prefix));
        self.retired.retain(|t| !t.starts_with(prefix));
        before - self.heap.len()
    }
}

/// Pops traces in rank order, extending non-accepting ones along non-self
/// edges into co-accessible states. The best accepting trace seen so far is
/// returned once a later accepting trace is no better, or once a popped
/// trace is more than `hill_threshold` edges longer than it.
pub fn generate_dfa_trace(
    dfa: &Dfa,
    costs: &EdgeCostTable,
    queue: &mut FrozenQueue,
    cfg: &TideConfig,
) -> Option<CandidateTrace> {
    let mut best: Option<Queued> = None;
    let mut held = Vec::new();
    let found = loop {
        let Some(cur) = queue.pop() else {
            break best.take();
        };
        let accepting = cur.trace.edge_count() > 0 && dfa.is_accepting(cur.trace.last());
        if let Some(b) = &best {
            let stop = (accepting && !queue.is_retired(&cur.trace.states) && cur.rank >= b.rank)
                || cur.trace.edge_count() > b.trace.edge_count() + cfg.hill_threshold;
            if stop {
                queue.heap.push(cur);
                break best.take();
            }
        }
        if accepting {
            if queue.is_retired(&cur.trace.states) {
                held.push(cur);
            } else if best.as_ref().is_none_or(|b| cur.rank < b.rank) {
                best = Some(cur);
            } else {
                held.push(cur);
            }
            continue;
        }
        let q = cur.trace.last();
        for e in dfa.edges(q) {
            if e.target == q || !dfa.is_coaccessible(e.target) {
                continue;
            }
            queue.push(cur.trace.extend(e.target, costs, cfg.cycle_cost));
        }
    };
    queue.heap.extend(held);
    found.map(|q| q.trace)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::automaton::fixtures::cost_example;
    use crate::automaton::{translate, CostProvenance};
    use crate::ltlf::parse;

    fn select(dfa: &Dfa, costs: &EdgeCostTable, queue: &mut FrozenQueue) -> Option<Vec<StateId>> {
        generate_dfa_trace(dfa, costs, queue, &TideConfig::default()).map(|t| t.states)
    }

    #[test]
    fn worked_example_prefers_the_cheaper_rank() {
        let d = cost_example();
        let costs = EdgeCostTable::from_dfa(&d);
        let mut q = FrozenQueue::new(0);
        let t = generate_dfa_trace(&d, &costs, &mut q, &TideConfig::default()).unwrap();
        assert_eq!(t.states, [0, 2, 3]);
        assert_eq!(trace_rank(&t).unwrap(), 1.0);
        let other = q.traces();
        assert_eq!(other[0].states, [0, 3]);
        assert_eq!(trace_rank(other[0]).unwrap(), 2.0);
    }

    #[test]
    fn failure_cost_switches_the_choice() {
        let d = cost_example();
        let mut costs = EdgeCostTable::from_dfa(&d);
        let mut q = FrozenQueue::new(0);
        let t = generate_dfa_trace(&d, &costs, &mut q, &TideConfig::default()).unwrap();
        costs.set(2, 3, 1000.0, CostProvenance::Failure);
        q.push(t);
        q.rerank(&costs, 100.0);
        assert_eq!(select(&d, &costs, &mut q).unwrap(), [0, 3]);
    }

    #[test]
    fn single_trace_and_empty_queue() {
        let d = translate(&parse("F(p)").unwrap(), 100).unwrap();
        let costs = EdgeCostTable::from_dfa(&d);
        let mut q = FrozenQueue::new(d.initial());
        assert_eq!(select(&d, &costs, &mut q).unwrap(), [0, 1]);
        assert!(q.is_empty());
        assert_eq!(select(&d, &costs, &mut q), None);

        let d = translate(&parse("false").unwrap(), 100).unwrap();
        let mut q = FrozenQueue::new(d.initial());
        assert_eq!(select(&d, &EdgeCostTable::from_dfa(&d), &mut q), None);
    }

    #[test]
    fn retired_traces_stay_queued_but_are_skipped() {
        let d = cost_example();
        let costs = EdgeCostTable::from_dfa(&d);
        let mut q = FrozenQueue::new(0);
        let t = select(&d, &costs, &mut q).unwrap();
        q.push(CandidateTrace { states: t.clone(), cost: 2.0 });
        q.retire(&t);
        assert_eq!(select(&d, &costs, &mut q).unwrap(), [0, 3]);
        assert!(q.contains(&t));
        assert_eq!(select(&d, &costs, &mut q), None);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn pruning_removes_traces_with_the_prefix() {
        let d = cost_example();
        let costs = EdgeCostTable::from_dfa(&d);
        let mut q = FrozenQueue::new(0);
        let t = select(&d, &costs, &mut q).unwrap();
        q.push(CandidateTrace { states: t, cost: 2.0 });
        assert_eq!(q.prune(&[0, 2]), 1);
        assert_eq!(q.len(), 1);
        assert_eq!(select(&d, &costs, &mut q).unwrap(), [0, 3]);
    }

    #[test]
    fn hill_threshold_bounds_the_lookahead() {
        // a long cheap detour never displaces a short accepting trace found first
        let d = translate(&parse("F(a & X(F(b & X(F(c))))) | F(d)").unwrap(), 100).unwrap();
        let costs = EdgeCostTable::from_dfa(&d);
        let cfg = TideConfig {
            hill_threshold: 0,
            ..TideConfig::default()
        };
        let mut q = FrozenQueue::new(d.initial());
        let t = generate_dfa_trace(&d, &costs, &mut q, &cfg).unwrap();
        assert!(d.is_accepting(t.last()));
        assert_eq!(t.edge_count(), 1);
    }

    #[test]
    fn cycles_are_penalised() {
        let d = Dfa::from_guards(
            &["a", "b"],
            0,
            &[2],
            3,
            &[
                (0, 0, "!a & !b"),
                (0, 1, "a"),
                (0, 2, "!a & b"),
                (1, 0, "!a"),
                (1, 1, "a"),
                (2, 2, "true"),
            ],
        )
        .unwrap();
        let mut costs = EdgeCostTable::from_dfa(&d);
        costs.set(0, 1, 0.0, CostProvenance::Success);
        costs.set(1, 0, 0.0, CostProvenance::Success);
        let mut q = FrozenQueue::new(0);
        assert_eq!(select(&d, &costs, &mut q).unwrap(), [0, 2]);
        let back = q.traces().into_iter().find(|t| t.states == [0, 1, 0, 2]).cloned().unwrap();
        assert_eq!(back.cost, 101.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rank_order_is_scale_invariant(
            c in prop_oneof![(1u32..1000).prop_map(f64::from), (0i32..8).prop_map(|k| 2f64.powi(-k))],
            goal in prop::sample::select(vec![
                "F(a & X(F(b)))",
                "F(a) & F(b)",
                "(!a U b) | F(a & c)",
                "F(a & X(a U b)) | F(c)",
                "G(a | F(b)) & F(c)",
            ]),
        ) {
            let d = translate(&parse(goal).unwrap(), 100).unwrap();
            let cfg = TideConfig::default();
            let base = EdgeCostTable::from_dfa(&d);
            let mut scaled = base.clone();
            scaled.scale(c);
            let scaled_cfg = TideConfig { cycle_cost: cfg.cycle_cost * c, ..cfg.clone() };
            let mut q1 = FrozenQueue::new(d.initial());
            let mut q2 = FrozenQueue::new(d.initial());
            let a = generate_dfa_trace(&d, &base, &mut q1, &cfg).map(|t| t.states);
            let b = generate_dfa_trace(&d, &scaled, &mut q2, &scaled_cfg).map(|t| t.states);
            prop_assert_eq!(a, b);
        }
    }
}
