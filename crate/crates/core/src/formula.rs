//! Modal formulas over `⊥`, `→` and `□`.
//!
//! Every other connective is sugar expanded at construction time, so two
//! formulas are equal exactly when their desugared trees coincide. Nodes are
//! reference counted and carry a cached structural hash; substitution keeps
//! untouched subtrees shared, so formulas produced by repeated substitution
//! stay small in memory even when their printed form is large.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// A modal formula. Cheap to clone.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

struct Node {
    kind: Kind,
    hash: u64,
    size: usize,
    height: usize,
}

/// The four primitive constructors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Kind {
    Falsum,
    Var(Arc<str>),
    Implies(Formula, Formula),
    Box(Formula),
}

const TAG_FALSUM: u64 = 0x9e37_79b9_7f4a_7c15;
const TAG_VAR: u64 = 0xc2b2_ae3d_27d4_eb4f;
const TAG_IMP: u64 = 0x1656_67b1_9e37_79f9;
const TAG_BOX: u64 = 0x27d4_eb2f_1656_67c5;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl Formula {
    fn mk(kind: Kind) -> Self {
        let (hash, size, height) = match &kind {
            Kind::Falsum => (mix(TAG_FALSUM), 1, 0),
            Kind::Var(name) => (mix(TAG_VAR ^ hash_str(name)), 1, 0),
            Kind::Implies(a, b) => (
                mix(TAG_IMP ^ a.0.hash.rotate_left(17) ^ mix(b.0.hash)),
                a.0.size.saturating_add(b.0.size).saturating_add(1),
                a.0.height.max(b.0.height) + 1,
            ),
            Kind::Box(a) => (
                mix(TAG_BOX ^ a.0.hash),
                a.0.size.saturating_add(1),
                a.0.height + 1,
            ),
        };
        Formula(Arc::new(Node {
            kind,
            hash,
            size,
            height,
        }))
    }

    pub fn falsum() -> Self {
        Self::mk(Kind::Falsum)
    }

    /// A propositional variable. Names are not validated here; the parser
    /// enforces the public identifier class.
    pub fn var(name: impl AsRef<str>) -> Self {
        Self::mk(Kind::Var(Arc::from(name.as_ref())))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Self::mk(Kind::Implies(a, b))
    }

    pub fn boxed(a: Formula) -> Self {
        Self::mk(Kind::Box(a))
    }

    /// `⊤ := ⊥ → ⊥`
    pub fn top() -> Self {
        Self::implies(Self::falsum(), Self::falsum())
    }

    /// `¬a := a → ⊥`
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Self::implies(a, Self::falsum())
    }

    /// `a ∧ b := ¬(a → ¬b)`
    pub fn and(a: Formula, b: Formula) -> Self {
        Self::not(Self::implies(a, Self::not(b)))
    }

    /// `a ∨ b := ¬a → b`
    pub fn or(a: Formula, b: Formula) -> Self {
        Self::implies(Self::not(a), b)
    }

    /// `a ↔ b := (a → b) ∧ (b → a)`
    pub fn iff(a: Formula, b: Formula) -> Self {
        Self::and(Self::implies(a.clone(), b.clone()), Self::implies(b, a))
    }

    /// `◇a := ¬□¬a`
    pub fn dia(a: Formula) -> Self {
        Self::not(Self::boxed(Self::not(a)))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Number of nodes in the tree (saturating).
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn is_falsum(&self) -> bool {
        matches!(self.kind(), Kind::Falsum)
    }

    pub fn is_top(&self) -> bool {
        matches!(self.kind(), Kind::Implies(a, b) if a.is_falsum() && b.is_falsum())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.kind() {
            Kind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            Kind::Implies(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_box(&self) -> Option<&Formula> {
        match self.kind() {
            Kind::Box(a) => Some(a),
            _ => None,
        }
    }

    /// Matches `a → ⊥`.
    pub fn as_not(&self) -> Option<&Formula> {
        match self.as_implies() {
            Some((a, b)) if b.is_falsum() => Some(a),
            _ => None,
        }
    }

    /// Matches the desugared shape of `a ∧ b`.
    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        let (a, nb) = self.as_not()?.as_implies()?;
        Some((a, nb.as_not()?))
    }

    /// Matches the desugared shape of `a ↔ b`.
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        let (l, r) = self.as_and()?;
        let (a, b) = l.as_implies()?;
        let (b2, a2) = r.as_implies()?;
        (a == a2 && b == b2).then_some((a, b))
    }

    /// Matches `◇a`.
    pub fn as_dia(&self) -> Option<&Formula> {
        self.as_not()?.as_box()?.as_not()
    }

    pub(crate) fn ptr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash || self.0.size != other.0.size {
            return false;
        }
        // Iterative to avoid deep recursion on long spines. Large node pairs
        // are compared once, so the cost is bounded by the DAG sizes rather
        // than the tree sizes.
        let mut stack = vec![(self, other)];
        let mut seen = std::collections::HashSet::new();
        while let Some((a, b)) = stack.pop() {
            if Arc::ptr_eq(&a.0, &b.0) {
                continue;
            }
            if a.0.hash != b.0.hash {
                return false;
            }
            if a.0.size > 32 && !seen.insert((a.ptr(), b.ptr())) {
                continue;
            }
            match (a.kind(), b.kind()) {
                (Kind::Falsum, Kind::Falsum) => {}
                (Kind::Var(x), Kind::Var(y)) if x == y => {}
                (Kind::Implies(a1, a2), Kind::Implies(b1, b2)) => {
                    stack.push((a1, b1));
                    stack.push((a2, b2));
                }
                (Kind::Box(x), Kind::Box(y)) => stack.push((x, y)),
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::print(self, false))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::print(self, true))
    }
}

/// Index `n ≥ 1` of the logic `wGL_n`; `n = 1` is GL.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicIndex(usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("logic index must be at least 1, got {0}")]
pub struct BadLogicIndex(pub usize);

impl LogicIndex {
    pub fn new(n: usize) -> Result<Self, BadLogicIndex> {
        if n == 0 {
            Err(BadLogicIndex(n))
        } else {
            Ok(LogicIndex(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn is_gl(self) -> bool {
        self.0 == 1
    }
}

impl fmt::Display for LogicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One step from a node to a child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Left,
    Right,
    Inner,
}

/// Address of one variable occurrence, with its modal depth.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccurrencePath {
    pub path: Vec<Step>,
    pub depth: usize,
}

impl OccurrencePath {
    pub fn new(path: Vec<Step>) -> Self {
        let depth = path.iter().filter(|s| **s == Step::Inner).count();
        OccurrencePath { path, depth }
    }

    /// The node this path addresses, if the path is valid in `host`.
    pub fn resolve<'a>(&self, host: &'a Formula) -> Option<&'a Formula> {
        let mut cur = host;
        for step in &self.path {
            cur = match (step, cur.kind()) {
                (Step::Left, Kind::Implies(a, _)) => a,
                (Step::Right, Kind::Implies(_, b)) => b,
                (Step::Inner, Kind::Box(a)) => a,
                _ => return None,
            };
        }
        Some(cur)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("boxdot needs k >= 1")]
    ZeroBoxdot,
    #[error("path {0:?} does not resolve to a variable")]
    NotAVariable(Vec<Step>),
    #[error("occurrence paths address different variables ({0} and {1})")]
    MixedVariables(String, String),
}

/// `□^k a`
pub fn box_power(k: usize, a: &Formula) -> Formula {
    (0..k).fold(a.clone(), |acc, _| Formula::boxed(acc))
}

/// Right-associated conjunction; the empty conjunction is `⊤`.
pub fn conj<I>(parts: I) -> Formula
where
    I: IntoIterator<Item = Formula>,
    I::IntoIter: DoubleEndedIterator,
{
    let mut it = parts.into_iter().rev();
    match it.next() {
        None => Formula::top(),
        Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
    }
}

/// `⊞_k a = □a ∧ □²a ∧ … ∧ □^k a`, or `a ∧ ⊞_k a` when `plus` is set.
pub fn boxdot(k: usize, a: &Formula, plus: bool) -> Result<Formula, FormulaError> {
    if k == 0 {
        return Err(FormulaError::ZeroBoxdot);
    }
    let body = conj((1..=k).map(|i| box_power(i, a)).collect::<Vec<_>>());
    Ok(if plus {
        Formula::and(a.clone(), body)
    } else {
        body
    })
}

/// Rewrites variables bottom-up, sharing every untouched subtree.
pub(crate) fn map_vars<F>(a: &Formula, f: &F) -> Formula
where
    F: Fn(&str) -> Option<Formula>,
{
    fn go<F: Fn(&str) -> Option<Formula>>(
        a: &Formula,
        f: &F,
        memo: &mut HashMap<usize, Formula>,
    ) -> Formula {
        if let Some(r) = memo.get(&a.ptr()) {
            return r.clone();
        }
        let out = match a.kind() {
            Kind::Falsum => a.clone(),
            Kind::Var(v) => f(v).unwrap_or_else(|| a.clone()),
            Kind::Implies(l, r) => {
                let l2 = go(l, f, memo);
                let r2 = go(r, f, memo);
                if l2.ptr_eq(l) && r2.ptr_eq(r) {
                    a.clone()
                } else {
                    Formula::implies(l2, r2)
                }
            }
            Kind::Box(b) => {
                let b2 = go(b, f, memo);
                if b2.ptr_eq(b) {
                    a.clone()
                } else {
                    Formula::boxed(b2)
                }
            }
        };
        memo.insert(a.ptr(), out.clone());
        out
    }
    go(a, f, &mut HashMap::new())
}

/// `a(b)`: replaces every occurrence of `p` by `b`.
pub fn substitute(a: &Formula, p: &str, b: &Formula) -> Formula {
    map_vars(a, &|v| (v == p).then(|| b.clone()))
}

/// Simultaneous substitution.
pub fn substitute_all(a: &Formula, map: &HashMap<String, Formula>) -> Formula {
    if map.is_empty() {
        return a.clone();
    }
    map_vars(a, &|v| map.get(v).cloned())
}

/// Replaces exactly the addressed occurrences by `b`.
pub fn substitute_at(
    a: &Formula,
    occs: &BTreeSet<OccurrencePath>,
    b: &Formula,
) -> Result<Formula, FormulaError> {
    let mut var: Option<&str> = None;
    for occ in occs {
        let node = occ
            .resolve(a)
            .and_then(Formula::as_var)
            .ok_or_else(|| FormulaError::NotAVariable(occ.path.clone()))?;
        match var {
            None => var = Some(node),
            Some(v) if v != node => {
                return Err(FormulaError::MixedVariables(v.to_string(), node.to_string()))
            }
            _ => {}
        }
    }
    fn go(a: &Formula, prefix: &mut Vec<Step>, occs: &BTreeSet<OccurrencePath>, b: &Formula) -> Formula {
        // Only descend where some path continues.
        let here = OccurrencePath::new(prefix.clone());
        if occs.contains(&here) {
            return b.clone();
        }
        if !occs.iter().any(|o| o.path.starts_with(prefix)) {
            return a.clone();
        }
        match a.kind() {
            Kind::Implies(l, r) => {
                prefix.push(Step::Left);
                let l2 = go(l, prefix, occs, b);
                prefix.pop();
                prefix.push(Step::Right);
                let r2 = go(r, prefix, occs, b);
                prefix.pop();
                Formula::implies(l2, r2)
            }
            Kind::Box(x) => {
                prefix.push(Step::Inner);
                let x2 = go(x, prefix, occs, b);
                prefix.pop();
                Formula::boxed(x2)
            }
            _ => a.clone(),
        }
    }
    Ok(go(a, &mut Vec::new(), occs, b))
}

/// Replaces the occurrences of `p` whose depth is congruent to `residue`
/// modulo `n` by `b`. Memoised on (node, depth mod n), so it runs on the
/// shared representation.
pub fn replace_by_residue(a: &Formula, p: &str, residue: usize, n: usize, b: &Formula) -> Formula {
    fn go(
        a: &Formula,
        d: usize,
        p: &str,
        residue: usize,
        n: usize,
        b: &Formula,
        memo: &mut HashMap<(usize, usize), Formula>,
    ) -> Formula {
        if let Some(r) = memo.get(&(a.ptr(), d)) {
            return r.clone();
        }
        let out = match a.kind() {
            Kind::Falsum => a.clone(),
            Kind::Var(v) => {
                if &**v == p && d == residue {
                    b.clone()
                } else {
                    a.clone()
                }
            }
            Kind::Implies(l, r) => {
                let l2 = go(l, d, p, residue, n, b, memo);
                let r2 = go(r, d, p, residue, n, b, memo);
                if l2.ptr_eq(l) && r2.ptr_eq(r) {
                    a.clone()
                } else {
                    Formula::implies(l2, r2)
                }
            }
            Kind::Box(x) => {
                let x2 = go(x, (d + 1) % n, p, residue, n, b, memo);
                if x2.ptr_eq(x) {
                    a.clone()
                } else {
                    Formula::boxed(x2)
                }
            }
        };
        memo.insert((a.ptr(), d), out.clone());
        out
    }
    go(a, 0, p, residue % n, n, b, &mut HashMap::new())
}

/// `A^k(p)`: `A^0(p) = p`, `A^{k+1}(p) = A(A^k(p))`.
pub fn iterate(a: &Formula, p: &str, k: usize) -> Formula {
    (0..k).fold(Formula::var(p), |acc, _| substitute(a, p, &acc))
}

/// The variables occurring in `a`.
pub fn atoms(a: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![a];
    while let Some(f) = stack.pop() {
        if !seen.insert(f.ptr()) {
            continue;
        }
        match f.kind() {
            Kind::Falsum => {}
            Kind::Var(v) => {
                out.insert(v.to_string());
            }
            Kind::Implies(l, r) => {
                stack.push(l);
                stack.push(r);
            }
            Kind::Box(x) => stack.push(x),
        }
    }
    out
}

pub fn contains_var(a: &Formula, p: &str) -> bool {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![a];
    while let Some(f) = stack.pop() {
        if !seen.insert(f.ptr()) {
            continue;
        }
        match f.kind() {
            Kind::Falsum => {}
            Kind::Var(v) => {
                if &**v == p {
                    return true;
                }
            }
            Kind::Implies(l, r) => {
                stack.push(l);
                stack.push(r);
            }
            Kind::Box(x) => stack.push(x),
        }
    }
    false
}

/// Names reserved for generated variables; the public parser rejects them.
pub fn is_reserved_name(name: &str) -> bool {
    name.starts_with('_')
}

/// The first `_fpN` name not occurring in any of `avoid`.
pub fn fresh_var<'a, I: IntoIterator<Item = &'a Formula>>(avoid: I) -> String {
    fresh_vars(avoid, 1).pop().unwrap()
}

/// `count` distinct fresh names, ascending.
pub fn fresh_vars<'a, I: IntoIterator<Item = &'a Formula>>(avoid: I, count: usize) -> Vec<String> {
    let used: BTreeSet<String> = avoid.into_iter().flat_map(atoms).collect();
    let mut out = Vec::with_capacity(count);
    let mut i = 0usize;
    while out.len() < count {
        let name = format!("_fp{i}");
        if !used.contains(&name) {
            out.push(name);
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn sugar_expands() {
        assert_eq!(f("~p"), Formula::implies(Formula::var("p"), Formula::falsum()));
        assert_eq!(f("true"), Formula::top());
        assert_eq!(f("p & q").as_and().map(|(a, _)| a.clone()), Some(f("p")));
        assert_eq!(f("p <-> q").as_iff().map(|(_, b)| b.clone()), Some(f("q")));
        assert_eq!(f("dia p").as_dia(), Some(&f("p")));
    }

    #[test]
    fn box_power_cases() {
        assert_eq!(box_power(0, &f("p")), f("p"));
        assert_eq!(box_power(3, &f("p")), f("box box box p"));
        assert_eq!(box_power(2, &f("box p")), f("box box box p"));
    }

    #[test]
    fn boxdot_cases() {
        assert_eq!(boxdot(1, &f("p"), false).unwrap(), f("box p"));
        assert_eq!(boxdot(2, &f("p"), true).unwrap(), f("p & (box p & box box p)"));
        assert_eq!(
            boxdot(3, &f("false"), false).unwrap(),
            f("box false & (box box false & box box box false)")
        );
        assert_eq!(boxdot(0, &f("p"), false), Err(FormulaError::ZeroBoxdot));
    }

    #[test]
    fn substitute_cases() {
        assert_eq!(substitute(&f("box (p -> q)"), "p", &f("false")), f("box (false -> q)"));
        assert_eq!(substitute(&f("p"), "p", &f("box q & r")), f("box q & r"));
        assert_eq!(
            substitute(&f("p & box (p -> box box p)"), "p", &f("box p")),
            f("box p & box (box p -> box box box p)")
        );
    }

    #[test]
    fn substitute_at_cases() {
        let a = f("box (p & box p)");
        let deep: BTreeSet<_> = crate::depth::occurrences(&a, "p")
            .into_iter()
            .filter(|o| o.depth == 2)
            .collect();
        assert_eq!(deep.len(), 1);
        assert_eq!(substitute_at(&a, &deep, &Formula::top()).unwrap(), f("box (p & box true)"));
        assert_eq!(substitute_at(&a, &BTreeSet::new(), &Formula::top()).unwrap(), a);
        let all: BTreeSet<_> = crate::depth::occurrences(&a, "p").into_iter().collect();
        assert_eq!(
            substitute_at(&a, &all, &f("q")).unwrap(),
            substitute(&a, "p", &f("q"))
        );
        let bad: BTreeSet<_> = [OccurrencePath::new(vec![Step::Inner])].into_iter().collect();
        assert!(matches!(substitute_at(&a, &bad, &f("q")), Err(FormulaError::NotAVariable(_))));
        let b = f("p -> q");
        let mixed: BTreeSet<_> = [
            OccurrencePath::new(vec![Step::Left]),
            OccurrencePath::new(vec![Step::Right]),
        ]
        .into_iter()
        .collect();
        assert!(matches!(substitute_at(&b, &mixed, &f("r")), Err(FormulaError::MixedVariables(..))));
    }

    #[test]
    fn iterate_cases() {
        assert_eq!(iterate(&f("box ~p"), "p", 0), f("p"));
        let boxed = f("box box ~p");
        let two = substitute(&iterate(&boxed, "p", 2), "p", &Formula::top());
        assert_eq!(two, f("box box ~box box ~true"));
        assert_eq!(iterate(&f("box q"), "p", 5), f("box q"));
    }

    #[test]
    fn atoms_cases() {
        assert_eq!(atoms(&f("p & box (p -> box box p)")), ["p".to_string()].into());
        assert!(atoms(&f("false")).is_empty());
        assert_eq!(atoms(&f("box (p -> q)")), ["p".to_string(), "q".to_string()].into());
    }

    #[test]
    fn residue_replacement_matches_paths() {
        let a = f("p & box (p -> box box p)");
        let r = replace_by_residue(&a, "p", 0, 3, &f("q"));
        assert_eq!(r, f("q & box (p -> box box q)"));
    }

    #[test]
    fn fresh_names_avoid_used() {
        let a = Formula::implies(Formula::var("_fp0"), Formula::var("p"));
        assert_eq!(fresh_var([&a]), "_fp1");
        assert_eq!(fresh_vars([&a], 2), vec!["_fp1".to_string(), "_fp2".to_string()]);
    }

    #[test]
    fn logic_index_rejects_zero() {
        assert!(LogicIndex::new(0).is_err());
        assert!(LogicIndex::new(1).unwrap().is_gl());
    }
}
