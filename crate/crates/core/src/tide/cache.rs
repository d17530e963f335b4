use std::collections::HashMap;

use crate::automaton::StateId;
use crate::domain::WorldStateBits;
use crate::reach_avoid::Plan;

/// Plans for realized trace prefixes, keyed by the DFA states visited.
#[derive(Clone, Debug, Default)]
pub struct PrefixCache {
    entries: HashMap<Vec<StateId>, (Plan, WorldStateBits)>,
    hits: usize,
    misses: usize,
}

impl PrefixCache {
    pub fn insert(&mut self, prefix: Vec<StateId>, plan: Plan, end: WorldStateBits) {
        self.entries.insert(prefix, (plan, end));
    }

    /// The longest cached prefix of `trace` with at least one edge, as the
    /// number of edges it covers, its plan and its end state.
    pub fn longest(&mut self, trace: &[StateId]) -> Option<(usize, &Plan, &WorldStateBits)> {
        let found = (2..=trace.len()).rev().find(|&n| self.entries.contains_key(&trace[..n]));
        match found {
            Some(n) => {
                self.hits += 1;
                let (p, s) = &self.entries[&trace[..n]];
                Some((n - 1, p, s))
            }
            None => {
                self.misses += 1;
                None
            }
        }
    }

    pub fn get(&self, prefix: &[StateId]) -> Option<&(Plan, WorldStateBits)> {
        self.entries.get(prefix)
    }

    pub fn hits(&self) -> usize {
        self.hits
    }

    pub fn misses(&self) -> usize {
        self.misses
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
