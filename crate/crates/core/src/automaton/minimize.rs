//! Partition-refinement minimization.
//!
//! States start split by acceptance and are refined by their signature: the
//! merged guard leading into each current block. Guards are canonical BDD
//! handles, so signatures compare by value. The quotient is renumbered in
//! breadth-first order from the initial state, with a rejecting sink (if
//! any) moved to the last index.

use std::collections::{HashMap, VecDeque};

use super::{Dfa, StateId};
use crate::bdd::BddRef;

pub fn minimize(d: &Dfa) -> Dfa {
    let mut bdd = d.bdd().clone();

    let mut reachable = vec![false; d.state_count()];
    reachable[d.initial()] = true;
    let mut queue = VecDeque::from([d.initial()]);
    while let Some(q) = queue.pop_front() {
        for e in d.edges(q) {
            if !reachable[e.target] {
                reachable[e.target] = true;
                queue.push_back(e.target);
            }
        }
    }
    let live: Vec<StateId> = (0..d.state_count()).filter(|&q| reachable[q]).collect();

    let mut block = vec![usize::MAX; d.state_count()];
    let mut n_blocks = 0;
    {
        let mut ids: HashMap<bool, usize> = HashMap::new();
        for &q in &live {
            let next = ids.len();
            block[q] = *ids.entry(d.is_accepting(q)).or_insert(next);
        }
        n_blocks = n_blocks.max(ids.len());
    }
    loop {
        let mut ids: HashMap<(usize, Vec<(usize, BddRef)>), usize> = HashMap::new();
        let mut next_block = vec![usize::MAX; d.state_count()];
        for &q in &live {
            let mut sig: Vec<(usize, BddRef)> = Vec::new();
            for e in d.edges(q) {
                let b = block[e.target];
                match sig.iter_mut().find(|s| s.0 == b) {
                    Some(s) => s.1 = bdd.or(s.1, e.guard),
                    None => sig.push((b, e.guard)),
                }
            }
            sig.sort();
            let next = ids.len();
            next_block[q] = *ids.entry((block[q], sig)).or_insert(next);
        }
        let count = ids.len();
        block = next_block;
        if count == n_blocks {
            break;
        }
        n_blocks = count;
    }

    // representative = smallest live state of each block
    let mut rep = vec![usize::MAX; n_blocks];
    for &q in &live {
        if rep[block[q]] == usize::MAX {
            rep[block[q]] = q;
        }
    }

    let mut order: Vec<usize> = Vec::with_capacity(n_blocks);
    let mut new_id = vec![usize::MAX; n_blocks];
    new_id[block[d.initial()]] = 0;
    order.push(block[d.initial()]);
    let mut i = 0;
    while i < order.len() {
        let b = order[i];
        for e in d.edges(rep[b]) {
            let t = block[e.target];
            if new_id[t] == usize::MAX {
                new_id[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }

    let is_rejecting_sink =
        |b: usize| !d.is_accepting(rep[b]) && d.edges(rep[b]).iter().all(|e| block[e.target] == b);
    if let Some(pos) = order.iter().position(|&b| is_rejecting_sink(b)) {
        let b = order.remove(pos);
        order.push(b);
        for (k, &b) in order.iter().enumerate() {
            new_id[b] = k;
        }
    }

    let mut accepting = Vec::with_capacity(order.len());
    let mut edges = Vec::with_capacity(order.len());
    for &b in &order {
        let q = rep[b];
        accepting.push(d.is_accepting(q));
        let mut out: Vec<(StateId, BddRef)> = Vec::new();
        for e in d.edges(q) {
            let t = new_id[block[e.target]];
            match out.iter_mut().find(|o| o.0 == t) {
                Some(o) => o.1 = bdd.or(o.1, e.guard),
                None => out.push((t, e.guard)),
            }
        }
        edges.push(out);
    }
    Dfa::from_parts(bdd, new_id[block[d.initial()]], accepting, edges)
        .expect("quotient of a complete deterministic automaton is complete and deterministic")
}
