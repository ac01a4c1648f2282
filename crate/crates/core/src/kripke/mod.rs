//! Finite Kripke models, extensional frame validation of the `wGL_n` axiom
//! schema, and exhaustive bounded countermodel search.
//!
//! Search results are evidence only. A missing countermodel says nothing
//! about theoremhood beyond the enumerated frames.

mod model;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

pub use model::{forces, KripkeModel, MAX_MODEL_WORLDS};

use crate::formula::{atoms, box_power, Formula, LogicIndex};
use model::Compiled;

/// Default bound on frame size for [`frame_validates_wgl`].
pub const FRAME_BOUND: usize = 6;
/// Largest `max_worlds` accepted by [`countermodel`].
pub const SEARCH_WORLD_BOUND: usize = 5;
/// Largest `|atoms| × max_worlds` accepted by [`countermodel`].
pub const VALUATION_BITS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("unknown world {0}")]
    UnknownWorld(usize),
    #[error("unvalued variable {0}")]
    UnvaluedVariable(String),
    #[error("a model needs between 1 and {MAX_MODEL_WORLDS} worlds, got {0}")]
    WorldCount(usize),
    #[error("bound exceeded: {what} is {got}, limit {limit}")]
    BoundExceeded { what: &'static str, got: usize, limit: usize },
    #[error("too many atoms: {atoms} atoms x {worlds} worlds exceeds {VALUATION_BITS} valuation bits")]
    TooManyAtoms { atoms: usize, worlds: usize },
    #[error("malformed model JSON: {0}")]
    Json(String),
}

/// A falsifying pointed model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: KripkeModel,
    pub world: usize,
}

/// Does the frame validate `□(□ⁿp → p) → □p`? Checked over every valuation
/// of `p`, at most [`FRAME_BOUND`] worlds.
pub fn frame_validates_wgl(worlds: usize, relation: &[(usize, usize)], n: LogicIndex) -> Result<bool, KripkeError> {
    frame_validates_wgl_bounded(worlds, relation, n, FRAME_BOUND)
}

pub fn frame_validates_wgl_bounded(
    worlds: usize,
    relation: &[(usize, usize)],
    n: LogicIndex,
    bound: usize,
) -> Result<bool, KripkeError> {
    if worlds > bound {
        return Err(KripkeError::BoundExceeded {
            what: "frame size",
            got: worlds,
            limit: bound,
        });
    }
    if worlds == 0 {
        return Err(KripkeError::WorldCount(0));
    }
    let mut succ = vec![0u64; worlds];
    for &(i, j) in relation {
        if i >= worlds || j >= worlds {
            return Err(KripkeError::UnknownWorld(i.max(j)));
        }
        succ[i] |= 1 << j;
    }
    Ok(validates(&Compiled::new(&axiom(n)), &succ))
}

fn axiom(n: LogicIndex) -> Formula {
    let p = Formula::var("p");
    Formula::implies(
        Formula::boxed(Formula::implies(box_power(n.get(), &p), p.clone())),
        Formula::boxed(p),
    )
}

fn validates(ax: &Compiled, succ: &[u64]) -> bool {
    let all = (1u64 << succ.len()) - 1;
    let mut buf = Vec::new();
    (0..=all).all(|v| ax.eval(succ, &[v], &mut buf) == all)
}

type FrameList = Arc<Vec<Vec<u64>>>;

/// Frames on exactly `k` worlds validating the schema, in adjacency-mask
/// order: edge `(i, j)` is bit `i * k + j`.
fn valid_frames(k: usize, n: LogicIndex) -> FrameList {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), FrameList>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().expect("frame cache").get(&(k, n.get())) {
        return f.clone();
    }
    let ax = Compiled::new(&axiom(n));
    let row = (1u64 << k) - 1;
    let frames: Vec<Vec<u64>> = (0u64..1 << (k * k))
        .map(|mask| (0..k).map(|i| mask >> (i * k) & row).collect::<Vec<u64>>())
        .filter(|succ| validates(&ax, succ))
        .collect();
    let frames = Arc::new(frames);
    cache
        .lock()
        .expect("frame cache")
        .insert((k, n.get()), frames.clone());
    frames
}

/// First falsifying pointed model for `a` over frames of `1..=max_worlds`
/// worlds validating the `wGL_n` schema.
///
/// Order: world count, then adjacency mask, then valuation (atom `i` at
/// world `w` is bit `i * k + w`, atoms sorted), then world.
pub fn countermodel(a: &Formula, n: LogicIndex, max_worlds: usize) -> Result<Option<Countermodel>, KripkeError> {
    if max_worlds > SEARCH_WORLD_BOUND {
        return Err(KripkeError::BoundExceeded {
            what: "max_worlds",
            got: max_worlds,
            limit: SEARCH_WORLD_BOUND,
        });
    }
    let names: Vec<String> = atoms(a).into_iter().collect();
    if names.len() * max_worlds > VALUATION_BITS {
        return Err(KripkeError::TooManyAtoms {
            atoms: names.len(),
            worlds: max_worlds,
        });
    }
    let c = Compiled::new(a);
    // Compiled::vars is in first-occurrence order; map back to sorted order.
    let slot: Vec<usize> = c
        .vars
        .iter()
        .map(|v| names.iter().position(|x| x == v).expect("atom present"))
        .collect();
    let mut buf = Vec::new();
    let mut val = vec![0u64; c.vars.len()];
    for k in 1..=max_worlds {
        let all = (1u64 << k) - 1;
        for succ in valid_frames(k, n).iter() {
            for v in 0u64..1 << (names.len() * k) {
                for (i, &s) in slot.iter().enumerate() {
                    val[i] = v >> (s * k) & all;
                }
                let t = c.eval(succ, &val, &mut buf);
                if t != all {
                    let world = (!t & all).trailing_zeros() as usize;
                    let sorted: Vec<u64> = (0..names.len()).map(|s| v >> (s * k) & all).collect();
                    return Ok(Some(Countermodel {
                        model: KripkeModel::from_masks(succ, &names, &sorted),
                        world,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use std::collections::BTreeSet;

    fn n(k: usize) -> LogicIndex {
        LogicIndex::new(k).unwrap()
    }

    fn model(worlds: usize, edges: &[(usize, usize)], val: &[(&str, &[usize])]) -> KripkeModel {
        KripkeModel::new(
            worlds,
            edges.iter().copied(),
            val.iter()
                .map(|(k, v)| (k.to_string(), v.iter().copied().collect::<BTreeSet<_>>())),
        )
        .unwrap()
    }

    #[test]
    fn forcing_examples() {
        let m = model(1, &[], &[]);
        assert!(forces(&m, 0, &parse("box false").unwrap()).unwrap());
        let m = model(1, &[(0, 0)], &[("p", &[])]);
        assert!(!forces(&m, 0, &parse("box p").unwrap()).unwrap());
        let m = model(2, &[(0, 1)], &[("p", &[1])]);
        assert!(forces(&m, 0, &parse("box p & ~p").unwrap()).unwrap());
    }

    #[test]
    fn forcing_errors() {
        let m = model(1, &[], &[]);
        assert_eq!(forces(&m, 3, &parse("p").unwrap()), Err(KripkeError::UnknownWorld(3)));
        assert_eq!(
            forces(&m, 0, &parse("p").unwrap()),
            Err(KripkeError::UnvaluedVariable("p".into()))
        );
        assert!(KripkeModel::new(2, [(0, 2)], []).is_err());
    }

    #[test]
    fn frame_examples() {
        for k in 1..=4 {
            assert!(frame_validates_wgl(1, &[], n(k)).unwrap());
            assert!(!frame_validates_wgl(1, &[(0, 0)], n(k)).unwrap());
        }
        for len in 1..=4 {
            let chain: Vec<_> = (0..len).flat_map(|i| (i + 1..len).map(move |j| (i, j))).collect();
            assert!(frame_validates_wgl(len, &chain, n(1)).unwrap());
        }
        assert!(matches!(
            frame_validates_wgl(7, &[], n(1)),
            Err(KripkeError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn countermodel_examples() {
        let w = countermodel(&parse("p").unwrap(), n(2), 3).unwrap().unwrap();
        assert_eq!(w.model.worlds(), 1);
        assert!(w.model.valuation()["p"].is_empty());
        assert!(countermodel(&parse("box p -> p").unwrap(), n(2), 2).unwrap().is_some());
        assert!(countermodel(&parse("p -> p").unwrap(), n(2), 3).unwrap().is_none());
    }

    #[test]
    fn countermodel_bounds() {
        let f = parse("p & q & r & s").unwrap();
        assert!(matches!(countermodel(&f, n(1), 5), Err(KripkeError::TooManyAtoms { .. })));
        assert!(matches!(countermodel(&f, n(1), 6), Err(KripkeError::BoundExceeded { .. })));
    }

    #[test]
    fn witness_really_falsifies() {
        for f in ["box q -> q", "q | box ~q", "dia q -> box q"] {
            let f = parse(f).unwrap();
            let w = countermodel(&f, n(2), 3).unwrap().unwrap();
            assert!(!forces(&w.model, w.world, &f).unwrap());
        }
        let lob = parse("box (box q -> q) -> box q").unwrap();
        assert!(countermodel(&lob, n(1), 3).unwrap().is_none());
    }

    #[test]
    fn model_json_round_trip() {
        let m = model(3, &[(0, 1), (1, 2)], &[("p", &[2]), ("q", &[])]);
        let s = m.to_json();
        assert_eq!(s, "{\"worlds\":3,\"edges\":[[0,1],[1,2]],\"valuation\":{\"p\":[2],\"q\":[]}}\n");
        assert_eq!(KripkeModel::from_json(&s).unwrap(), m);
        assert!(KripkeModel::from_json("{\"worlds\":1,\"edges\":[[0,1]],\"valuation\":{}}").is_err());
    }
}
