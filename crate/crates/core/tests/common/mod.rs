#![allow(dead_code)]

use std::collections::BTreeSet;

use modal_fixpoint::kripke::KripkeModel;
use modal_fixpoint::{Formula, LogicIndex};
use proptest::prelude::*;

pub fn n(k: usize) -> LogicIndex {
    LogicIndex::new(k).unwrap()
}

/// Core formulas over `vars`, with sugar constructors mixed in so that the
/// sugared printer sees its patterns.
pub fn formula(vars: &'static [&'static str], depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::falsum()),
        Just(Formula::top()),
        proptest::sample::select(vars).prop_map(Formula::var),
    ];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            3 => inner.clone().prop_map(Formula::boxed),
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            1 => inner.clone().prop_map(Formula::not),
            1 => inner.clone().prop_map(Formula::dia),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            1 => (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

/// Models on 1 to `max_worlds` worlds valuing every name in `vars`.
pub fn model(vars: &'static [&'static str], max_worlds: usize) -> impl Strategy<Value = KripkeModel> {
    (1..=max_worlds).prop_flat_map(move |k| {
        (
            proptest::collection::vec(any::<bool>(), k * k),
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), k), vars.len()),
        )
            .prop_map(move |(adj, val)| {
                let edges = (0..k * k).filter(|&b| adj[b]).map(|b| (b / k, b % k));
                let val = vars.iter().zip(val).map(|(v, bits)| {
                    let ws: BTreeSet<usize> = (0..k).filter(|&w| bits[w]).collect();
                    (v.to_string(), ws)
                });
                KripkeModel::new(k, edges, val).unwrap()
            })
    })
}
