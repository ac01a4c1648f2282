mod common;

use std::collections::BTreeSet;

use common::{formula, n};
use modal_fixpoint::kripke::{countermodel, forces, frame_validates_wgl, KripkeModel};
use modal_fixpoint::{box_power, Formula};
use proptest::prelude::*;

fn frames(k: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    (0u32..1 << (k * k)).map(move |mask| {
        (0..k * k)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| (b / k, b % k))
            .collect()
    })
}

#[test]
fn gl_frames_are_transitive_irreflexive() {
    for k in 1..=4 {
        for rel in frames(k) {
            let has = |i, j| rel.contains(&(i, j));
            let irreflexive = (0..k).all(|i| !has(i, i));
            let transitive =
                (0..k).all(|i| (0..k).all(|j| (0..k).all(|l| !(has(i, j) && has(j, l)) || has(i, l))));
            assert_eq!(
                frame_validates_wgl(k, &rel, n(1)).unwrap(),
                irreflexive && transitive,
                "{rel:?}"
            );
        }
    }
}

#[test]
fn trans_holds_on_valid_frames() {
    let p = Formula::var("p");
    for m in 1..=3 {
        let goal = Formula::implies(Formula::boxed(p.clone()), box_power(m + 1, &p));
        for k in 1..=4 {
            for rel in frames(k).filter(|r| frame_validates_wgl(k, r, n(m)).unwrap()) {
                for v in 0u32..1 << k {
                    let val: BTreeSet<usize> = (0..k).filter(|w| v >> w & 1 == 1).collect();
                    let model = KripkeModel::new(k, rel.iter().copied(), [("p".to_string(), val)]).unwrap();
                    for w in 0..k {
                        assert!(forces(&model, w, &goal).unwrap(), "n={m} {rel:?} v={v:b} w={w}");
                    }
                }
            }
        }
    }
}

#[test]
fn reflexive_points_never_validate() {
    for m in 1..=4 {
        for k in 1..=3 {
            for rel in frames(k).filter(|r| r.iter().any(|(i, j)| i == j)) {
                assert!(!frame_validates_wgl(k, &rel, n(m)).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn search_is_monotone(f in formula(&["p", "q"], 4), m in 1usize..=3, k in 1usize..=3) {
        let small = countermodel(&f, n(m), k).unwrap();
        let large = countermodel(&f, n(m), k + 1).unwrap();
        if small.is_some() {
            prop_assert_eq!(small, large);
        }
    }

    #[test]
    fn witnesses_falsify(f in formula(&["p", "q"], 4), m in 1usize..=3) {
        if let Some(c) = countermodel(&f, n(m), 3).unwrap() {
            prop_assert!(!forces(&c.model, c.world, &f).unwrap());
            let rel: Vec<_> = c.model.edges().iter().copied().collect();
            prop_assert!(frame_validates_wgl(c.model.worlds(), &rel, n(m)).unwrap());
        }
    }

    #[test]
    fn model_json_round_trip(m in common::model(&["p", "q"], 4)) {
        prop_assert_eq!(KripkeModel::from_json(&m.to_json()).unwrap(), m);
    }
}
