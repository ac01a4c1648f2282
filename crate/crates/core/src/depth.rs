//! Modal depths of variable occurrences: `dep(A, p)`, its residues modulo
//! `n`, and occurrence selection by residue.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::formula::{Formula, Kind, LogicIndex, OccurrencePath, Step};

/// `dep(A, p)` together with its image modulo `n` when a modulus is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthProfile {
    pub depths: BTreeSet<usize>,
    pub modulus: Option<usize>,
    pub residues: Option<BTreeSet<usize>>,
}

impl DepthProfile {
    pub fn new(a: &Formula, p: &str, modulus: Option<LogicIndex>) -> Self {
        let depths = dep(a, p);
        let residues = modulus.map(|n| depths.iter().map(|d| d % n.get()).collect());
        DepthProfile {
            depths,
            modulus: modulus.map(LogicIndex::get),
            residues,
        }
    }
}

/// The set of depths of occurrences of `p` in `a`.
pub fn dep(a: &Formula, p: &str) -> BTreeSet<usize> {
    fn go(a: &Formula, p: &str, memo: &mut HashMap<usize, Rc<BTreeSet<usize>>>) -> Rc<BTreeSet<usize>> {
        if let Some(r) = memo.get(&a.ptr()) {
            return r.clone();
        }
        let out: Rc<BTreeSet<usize>> = match a.kind() {
            Kind::Var(v) if &**v == p => Rc::new([0].into()),
            Kind::Var(_) | Kind::Falsum => Rc::new(BTreeSet::new()),
            Kind::Implies(l, r) => {
                let (l, r) = (go(l, p, memo), go(r, p, memo));
                if r.is_empty() {
                    l
                } else if l.is_empty() {
                    r
                } else {
                    Rc::new(l.union(&r).copied().collect())
                }
            }
            Kind::Box(x) => Rc::new(go(x, p, memo).iter().map(|d| d + 1).collect()),
        };
        memo.insert(a.ptr(), out.clone());
        out
    }
    (*go(a, p, &mut HashMap::new())).clone()
}

/// `dep_n(A, p)` as canonical residues in `[0, n)`.
pub fn dep_mod(a: &Formula, p: &str, n: LogicIndex) -> BTreeSet<usize> {
    let n = n.get();
    fn go(a: &Formula, p: &str, n: usize, memo: &mut HashMap<usize, Rc<BTreeSet<usize>>>) -> Rc<BTreeSet<usize>> {
        if let Some(r) = memo.get(&a.ptr()) {
            return r.clone();
        }
        let out: Rc<BTreeSet<usize>> = match a.kind() {
            Kind::Var(v) if &**v == p => Rc::new([0].into()),
            Kind::Var(_) | Kind::Falsum => Rc::new(BTreeSet::new()),
            Kind::Implies(l, r) => {
                let (l, r) = (go(l, p, n, memo), go(r, p, n, memo));
                Rc::new(l.union(&r).copied().collect())
            }
            Kind::Box(x) => Rc::new(go(x, p, n, memo).iter().map(|d| (d + 1) % n).collect()),
        };
        memo.insert(a.ptr(), out.clone());
        out
    }
    (*go(a, p, n, &mut HashMap::new())).clone()
}

/// Every occurrence of `p` lies under at least one box.
pub fn is_modalized(a: &Formula, p: &str) -> bool {
    fn go(a: &Formula, p: &str) -> bool {
        match a.kind() {
            Kind::Var(v) => &**v != p,
            Kind::Falsum | Kind::Box(_) => true,
            Kind::Implies(l, r) => go(l, p) && go(r, p),
        }
    }
    go(a, p)
}

/// All occurrences of `p`, left to right.
pub fn occurrences(a: &Formula, p: &str) -> Vec<OccurrencePath> {
    fn go(a: &Formula, p: &str, prefix: &mut Vec<Step>, out: &mut Vec<OccurrencePath>) {
        match a.kind() {
            Kind::Var(v) if &**v == p => out.push(OccurrencePath::new(prefix.clone())),
            Kind::Var(_) | Kind::Falsum => {}
            Kind::Implies(l, r) => {
                prefix.push(Step::Left);
                go(l, p, prefix, out);
                prefix.pop();
                prefix.push(Step::Right);
                go(r, p, prefix, out);
                prefix.pop();
            }
            Kind::Box(x) => {
                prefix.push(Step::Inner);
                go(x, p, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(a, p, &mut Vec::new(), &mut out);
    out
}

/// Occurrences of `p` whose depth is congruent to `r` modulo `n`.
pub fn occurrences_by_residue(a: &Formula, p: &str, r: usize, n: LogicIndex) -> BTreeSet<OccurrencePath> {
    occurrences(a, p)
        .into_iter()
        .filter(|o| o.depth % n.get() == r % n.get())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn n(k: usize) -> LogicIndex {
        LogicIndex::new(k).unwrap()
    }

    #[test]
    fn dep_examples() {
        assert_eq!(dep(&f("p & box (p -> box box p)"), "p"), [0, 1, 3].into());
        assert!(dep(&f("q"), "p").is_empty());
        assert_eq!(dep(&f("box box ~p"), "p"), [2].into());
    }

    #[test]
    fn dep_mod_examples() {
        assert_eq!(dep_mod(&f("p & box (p -> box box p)"), "p", n(3)), [0, 1].into());
        assert_eq!(dep_mod(&f("box box ~p"), "p", n(3)), [2].into());
        assert!(dep_mod(&f("box q"), "p", n(2)).is_empty());
    }

    #[test]
    fn profile() {
        let prof = DepthProfile::new(&f("p & box (p -> box box p)"), "p", Some(n(3)));
        assert_eq!(prof.depths, [0, 1, 3].into());
        assert_eq!(prof.residues, Some([0, 1].into()));
        let none = DepthProfile::new(&f("q"), "p", None);
        assert!(none.depths.is_empty() && none.residues.is_none());
    }

    #[test]
    fn modalized() {
        assert!(is_modalized(&f("box ~p"), "p"));
        assert!(!is_modalized(&f("p"), "p"));
        assert!(is_modalized(&f("q"), "p"));
        assert!(!is_modalized(&f("box p & p"), "p"));
    }

    #[test]
    fn residue_selection() {
        let a = f("p & box (p -> box box p)");
        let zero = occurrences_by_residue(&a, "p", 0, n(3));
        assert_eq!(zero.iter().map(|o| o.depth).collect::<Vec<_>>(), vec![0, 3]);
        for o in &zero {
            assert_eq!(o.resolve(&a), Some(&f("p")));
        }
        assert!(occurrences_by_residue(&f("box box ~p"), "p", 0, n(3)).is_empty());
        let root = occurrences_by_residue(&f("p"), "p", 0, n(2));
        assert_eq!(root.into_iter().collect::<Vec<_>>(), vec![OccurrencePath::new(vec![])]);
    }
}
