use super::realize::Realization;
use super::select::FrozenQueue;
use super::TideConfig;
use crate::automaton::{CandidateTrace, CostProvenance, EdgeCostTable, StateId};

/// Updates edge costs after a realization attempt of `trace` and re-ranks
/// the queue.
///
/// Realized edges get the success cost and the failed edge the failure cost.
/// An exhaustive failure removes every queued trace sharing the failed
/// prefix; any other failure puts `trace` back in the queue.
pub fn apply_feedback(
    costs: &mut EdgeCostTable,
    queue: &mut FrozenQueue,
    trace: &[StateId],
    r: &Realization,
    cfg: &TideConfig,
) {
    for &(a, b) in &r.realized {
        if a != b {
            costs.set(a, b, cfg.success_cost, CostProvenance::Success);
        }
    }
    if let Err(f) = &r.outcome {
        let (a, b) = (trace[f.step], trace[f.step + 1]);
        if f.exhaustive {
            costs.set(a, b, cfg.failure_cost, CostProvenance::Pruned);
            queue.prune(&trace[..=f.step + 1]);
        } else {
            costs.set(a, b, cfg.failure_cost, CostProvenance::Failure);
            if !queue.contains(trace) {
                queue.push(CandidateTrace {
                    states: trace.to_vec(),
                    cost: 0.0,
                });
            }
            if !f.retry {
                queue.retire(trace);
            }
        }
    }
    queue.rerank(costs, cfg.cycle_cost);
}

#[cfg(test)]
mod tests {
    use super::super::realize::Failure;
    use super::super::select::generate_dfa_trace;
    use super::*;
    use crate::automaton::fixtures::cost_example;
    use crate::reach_avoid::Plan;

    fn realization(outcome: Result<Plan, Failure>, realized: Vec<(StateId, StateId)>) -> Realization {
        Realization {
            outcome,
            realized,
            solver_calls: 0,
            cache_hits: 0,
            unintended: 0,
            expanded: 0,
        }
    }

    fn setup() -> (crate::automaton::Dfa, EdgeCostTable, FrozenQueue, Vec<StateId>) {
        let d = cost_example();
        let costs = EdgeCostTable::from_dfa(&d);
        let mut q = FrozenQueue::new(0);
        let t = generate_dfa_trace(&d, &costs, &mut q, &TideConfig::default()).unwrap();
        (d, costs, q, t.states)
    }

    #[test]
    fn success_lowers_costs_below_every_base() {
        let (_, mut costs, mut q, t) = setup();
        let r = realization(Ok(Plan::default()), vec![(0, 2), (2, 3)]);
        apply_feedback(&mut costs, &mut q, &t, &r, &TideConfig::default());
        let e = costs.entry(0, 2).unwrap();
        assert_eq!(e.cost, 0.0);
        assert_eq!(e.provenance, CostProvenance::Success);
        assert!(costs.iter().all(|(_, c)| c.provenance == CostProvenance::Success || c.base > 0.0));
    }

    #[test]
    fn non_exhaustive_failure_keeps_the_trace() {
        let (_, mut costs, mut q, t) = setup();
        let f = Failure { step: 1, exhaustive: false, retry: false };
        let r = realization(Err(f), vec![(0, 2)]);
        let cfg = TideConfig::default();
        apply_feedback(&mut costs, &mut q, &t, &r, &cfg);
        let e = costs.entry(2, 3).unwrap();
        assert_eq!((e.cost, e.provenance), (1000.0, CostProvenance::Failure));
        assert!(e.cost > costs.iter().map(|(_, c)| c.base).fold(0.0, f64::max));
        assert!(q.contains(&t));
        assert!(q.is_retired(&t));
        let ranked: Vec<_> = q.traces().into_iter().map(|t| (t.states.clone(), t.cost)).collect();
        assert!(ranked.contains(&(t.clone(), 1000.0)));
        assert_eq!(q.generation(), 1);
    }

    #[test]
    fn exhaustive_failure_prunes_the_prefix() {
        let (d, mut costs, mut q, _) = setup();
        // fill the queue with everything below 0 -> 2
        let mut t = crate::automaton::CandidateTrace::start(0);
        t = t.extend(2, &costs, 100.0);
        q.push(t.extend(3, &costs, 100.0));
        q.push(t);
        assert!(d.is_accepting(3));
        let f = Failure { step: 0, exhaustive: true, retry: false };
        let r = realization(Err(f), vec![]);
        apply_feedback(&mut costs, &mut q, &[0, 2, 3], &r, &TideConfig::default());
        assert!(q.traces().iter().all(|t| !t.states.starts_with(&[0, 2])));
        assert_eq!(costs.entry(0, 2).unwrap().provenance, CostProvenance::Pruned);
        assert_eq!(q.len(), 1);
    }
}
