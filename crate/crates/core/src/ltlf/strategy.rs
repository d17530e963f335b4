use proptest::prelude::*;

use super::{Formula, Trace, WorldState};

/// Random formulas over `atoms` with nesting depth at most `depth`.
pub(crate) fn formula(atoms: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        proptest::sample::select(atoms).prop_map(Formula::atom),
        proptest::sample::select(atoms).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::until(a, b)),
        ]
    })
    .boxed()
}

/// Random non-empty traces over `atoms` of length at most `max_len`.
pub(crate) fn trace(atoms: &'static [&'static str], max_len: usize) -> BoxedStrategy<Trace> {
    let step = proptest::collection::vec(any::<bool>(), atoms.len()).prop_map(move |bits| {
        atoms
            .iter()
            .zip(bits)
            .filter(|(_, b)| *b)
            .map(|(a, _)| *a)
            .collect::<WorldState>()
    });
    proptest::collection::vec(step, 1..=max_len)
        .prop_map(|steps| Trace::new(steps).expect("non-empty"))
        .boxed()
}
