//! Untrusted proof builder.
//!
//! A [`Prover`] accumulates primitive lines, deduplicated by formula, and
//! hands out [`Thm`] handles to proven lines. Derived rules live here and in
//! `lemmas`; all of them bottom out in the five primitive justifications, so
//! their output is only as trustworthy as the kernel that re-checks it.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::cert::{Certificate, Justification, ProofLine};
use super::kernel::CheckError;
use super::taut::{taut_check, TautError};
use crate::formula::{box_power, conj, Formula, Kind, LogicIndex};

/// Handle to a proven line of a [`Prover`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Thm(usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeriveError {
    #[error("step is not a tautology: {0}")]
    NotTautology(String),
    #[error(transparent)]
    Taut(#[from] TautError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("side condition of {kind} violated: residues {residues:?}")]
    SideCondition {
        kind: &'static str,
        residues: BTreeSet<usize>,
    },
    #[error("premise certificate rejected: {0}")]
    Premise(CheckError),
    #[error("premise is for n = {found}, requested n = {expected}")]
    LogicMismatch { expected: usize, found: usize },
    #[error("trace inconsistent with input: {0}")]
    Trace(String),
}

pub(crate) fn short(f: &Formula) -> String {
    let s = crate::print::print(f, true);
    if s.len() > 160 {
        let mut cut = 160;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        format!("{}…", &s[..cut])
    } else {
        s
    }
}

pub struct Prover {
    n: LogicIndex,
    lines: Vec<ProofLine>,
    index: HashMap<Formula, usize>,
}

impl Prover {
    pub fn new(n: LogicIndex) -> Self {
        Prover {
            n,
            lines: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn logic(&self) -> LogicIndex {
        self.n
    }

    pub(crate) fn n(&self) -> usize {
        self.n.get()
    }

    pub fn formula(&self, t: Thm) -> &Formula {
        &self.lines[t.0].formula
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    fn add(&mut self, formula: Formula, justification: Justification) -> Thm {
        if let Some(&i) = self.index.get(&formula) {
            return Thm(i);
        }
        let i = self.lines.len();
        self.index.insert(formula.clone(), i);
        self.lines.push(ProofLine { formula, justification });
        Thm(i)
    }

    /// Already proven?
    pub fn lookup(&self, f: &Formula) -> Option<Thm> {
        self.index.get(f).map(|&i| Thm(i))
    }

    pub fn taut(&mut self, f: Formula) -> Result<Thm, DeriveError> {
        if let Some(t) = self.lookup(&f) {
            return Ok(t);
        }
        if !taut_check(&f)? {
            return Err(DeriveError::NotTautology(short(&f)));
        }
        Ok(self.add(f, Justification::Taut))
    }

    /// From `a` and `a → b`, `b`.
    pub fn mp(&mut self, a: Thm, imp: Thm) -> Result<Thm, DeriveError> {
        let (ante, cons) = self
            .formula(imp)
            .as_implies()
            .ok_or_else(|| DeriveError::Shape("modus ponens on a non-implication".into()))?;
        if ante != self.formula(a) {
            return Err(DeriveError::Shape(format!(
                "modus ponens antecedent mismatch: have {}, need {}",
                short(self.formula(a)),
                short(ante)
            )));
        }
        let cons = cons.clone();
        if let Some(t) = self.lookup(&cons) {
            return Ok(t);
        }
        Ok(self.add(cons, Justification::Mp(a.0, imp.0)))
    }

    pub fn nec(&mut self, t: Thm) -> Thm {
        let f = Formula::boxed(self.formula(t).clone());
        if let Some(r) = self.lookup(&f) {
            return r;
        }
        self.add(f, Justification::Nec(t.0))
    }

    pub fn nec_k(&mut self, t: Thm, k: usize) -> Thm {
        (0..k).fold(t, |acc, _| self.nec(acc))
    }

    /// `□(x → y) → (□x → □y)`
    pub fn axk(&mut self, x: &Formula, y: &Formula) -> Thm {
        let f = Formula::implies(
            Formula::boxed(Formula::implies(x.clone(), y.clone())),
            Formula::implies(Formula::boxed(x.clone()), Formula::boxed(y.clone())),
        );
        self.add(f, Justification::AxK)
    }

    /// `□(□ⁿx → x) → □x`
    pub fn axwgl(&mut self, x: &Formula) -> Thm {
        let f = Formula::implies(
            Formula::boxed(Formula::implies(box_power(self.n(), x), x.clone())),
            Formula::boxed(x.clone()),
        );
        self.add(f, Justification::AxWgl)
    }

    /// Tautological consequence: proves `goal` from `premises` when
    /// `p₁ → (p₂ → … → goal)` is a tautology.
    pub fn chain(&mut self, premises: &[Thm], goal: Formula) -> Result<Thm, DeriveError> {
        if let Some(t) = self.lookup(&goal) {
            return Ok(t);
        }
        let imp = premises
            .iter()
            .rev()
            .fold(goal, |acc, &p| Formula::implies(self.formula(p).clone(), acc));
        let mut cur = self.taut(imp)?;
        for &p in premises {
            cur = self.mp(p, cur)?;
        }
        Ok(cur)
    }

    /// From `x → y`, `□x → □y`.
    pub fn regularity(&mut self, t: Thm) -> Result<Thm, DeriveError> {
        let (x, y) = self
            .formula(t)
            .as_implies()
            .map(|(x, y)| (x.clone(), y.clone()))
            .ok_or_else(|| DeriveError::Shape("regularity needs an implication".into()))?;
        let boxed = self.nec(t);
        let k = self.axk(&x, &y);
        self.mp(boxed, k)
    }

    /// From `x → y`, `□ᵏx → □ᵏy`.
    pub fn regularity_k(&mut self, t: Thm, k: usize) -> Result<Thm, DeriveError> {
        let mut cur = t;
        for _ in 0..k {
            cur = self.regularity(cur)?;
        }
        Ok(cur)
    }

    /// `□(x ↔ y) → (□x ↔ □y)`
    pub fn box_iff(&mut self, x: &Formula, y: &Formula) -> Result<Thm, DeriveError> {
        let e = Formula::iff(x.clone(), y.clone());
        let fwd = self.taut(Formula::implies(e.clone(), Formula::implies(x.clone(), y.clone())))?;
        let bwd = self.taut(Formula::implies(e.clone(), Formula::implies(y.clone(), x.clone())))?;
        let r1 = self.regularity(fwd)?;
        let r2 = self.regularity(bwd)?;
        let k1 = self.axk(x, y);
        let k2 = self.axk(y, x);
        let goal = Formula::implies(
            Formula::boxed(e),
            Formula::iff(Formula::boxed(x.clone()), Formula::boxed(y.clone())),
        );
        self.chain(&[r1, r2, k1, k2], goal)
    }

    /// `□x₁ ∧ … ∧ □xₖ → □(x₁ ∧ … ∧ xₖ)`
    pub fn box_conj_intro(&mut self, parts: &[Formula]) -> Result<Thm, DeriveError> {
        let whole = conj(parts.to_vec());
        let boxed_parts = conj(parts.iter().map(|x| Formula::boxed(x.clone())).collect::<Vec<_>>());
        let goal = Formula::implies(boxed_parts, Formula::boxed(whole.clone()));
        if let Some(t) = self.lookup(&goal) {
            return Ok(t);
        }
        match parts.len() {
            0 => {
                let top = self.taut(Formula::top())?;
                let boxed = self.nec(top);
                self.chain(&[boxed], goal)
            }
            1 => self.taut(goal),
            _ => {
                // r_i = x_{i+1} → … → x_k → whole
                let mut rs = vec![whole];
                for x in parts.iter().rev() {
                    let next = Formula::implies(x.clone(), rs.last().unwrap().clone());
                    rs.push(next);
                }
                rs.reverse();
                let r0 = self.taut(rs[0].clone())?;
                let mut prem = vec![self.nec(r0)];
                for (i, x) in parts.iter().enumerate() {
                    prem.push(self.axk(x, &rs[i + 1]));
                }
                self.chain(&prem, goal)
            }
        }
    }

    /// `□(x₁ ∧ … ∧ xₖ) → □x₁ ∧ … ∧ □xₖ`
    pub fn box_conj_elim(&mut self, parts: &[Formula]) -> Result<Thm, DeriveError> {
        let whole = conj(parts.to_vec());
        let goal = Formula::implies(
            Formula::boxed(whole.clone()),
            conj(parts.iter().map(|x| Formula::boxed(x.clone())).collect::<Vec<_>>()),
        );
        if let Some(t) = self.lookup(&goal) {
            return Ok(t);
        }
        let mut prem = Vec::with_capacity(parts.len());
        for x in parts {
            let t = self.taut(Formula::implies(whole.clone(), x.clone()))?;
            prem.push(self.regularity(t)?);
        }
        self.chain(&prem, goal)
    }

    /// Proves the goal of `cert` inside this prover, optionally applying a
    /// uniform substitution to every line first.
    pub fn import(&mut self, cert: &Certificate, subst: Option<&HashMap<String, Formula>>) -> Result<Thm, DeriveError> {
        if cert.logic != self.n {
            return Err(DeriveError::LogicMismatch {
                expected: self.n(),
                found: cert.logic.get(),
            });
        }
        self.import_lines(&cert.lines, subst)
    }

    fn import_lines(&mut self, lines: &[ProofLine], subst: Option<&HashMap<String, Formula>>) -> Result<Thm, DeriveError> {
        let mut sub = Substituter::new(subst);
        let mut map: Vec<Thm> = Vec::with_capacity(lines.len());
        for line in lines {
            let f = sub.apply(&line.formula);
            let t = match line.justification {
                Justification::Taut => self.taut(f)?,
                Justification::AxK | Justification::AxWgl => {
                    if let Some(t) = self.lookup(&f) {
                        t
                    } else {
                        self.add(f, line.justification)
                    }
                }
                Justification::Mp(i, j) => {
                    let (a, b) = (map[i], map[j]);
                    self.mp(a, b)?
                }
                Justification::Nec(i) => self.nec(map[i]),
            };
            map.push(t);
        }
        map.last()
            .copied()
            .ok_or_else(|| DeriveError::Shape("empty derivation".into()))
    }

    /// The lines `t` depends on, renumbered, ending in `t`.
    pub fn lines_for(&self, t: Thm) -> Vec<ProofLine> {
        let mut needed = vec![false; t.0 + 1];
        needed[t.0] = true;
        for i in (0..=t.0).rev() {
            if needed[i] {
                for p in self.lines[i].justification.premises() {
                    needed[p] = true;
                }
            }
        }
        let mut renum = vec![usize::MAX; t.0 + 1];
        let mut out = Vec::new();
        for i in 0..=t.0 {
            if !needed[i] {
                continue;
            }
            renum[i] = out.len();
            let justification = match self.lines[i].justification {
                Justification::Mp(a, b) => Justification::Mp(renum[a], renum[b]),
                Justification::Nec(a) => Justification::Nec(renum[a]),
                j => j,
            };
            out.push(ProofLine {
                formula: self.lines[i].formula.clone(),
                justification,
            });
        }
        out
    }

    /// Re-proves `t` with `subst` applied uniformly to its derivation.
    pub fn instantiate(&mut self, t: Thm, subst: &HashMap<String, Formula>) -> Result<Thm, DeriveError> {
        let lines = self.lines_for(t);
        self.import_lines(&lines, Some(subst))
    }

    /// A pruned certificate whose last line is `t`.
    pub fn certificate(&self, t: Thm) -> Certificate {
        Certificate {
            logic: self.n,
            goal: self.formula(t).clone(),
            lines: self.lines_for(t),
        }
    }
}

/// Uniform substitution with a memo shared across all lines of a derivation.
pub(crate) struct Substituter<'a> {
    map: Option<&'a HashMap<String, Formula>>,
    memo: HashMap<usize, (Formula, Formula)>,
}

impl<'a> Substituter<'a> {
    pub(crate) fn new(map: Option<&'a HashMap<String, Formula>>) -> Self {
        Substituter {
            map,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn apply(&mut self, f: &Formula) -> Formula {
        let Some(map) = self.map else {
            return f.clone();
        };
        if map.is_empty() {
            return f.clone();
        }
        if let Some((_, out)) = self.memo.get(&f.ptr()) {
            return out.clone();
        }
        let out = match f.kind() {
            Kind::Falsum => f.clone(),
            Kind::Var(v) => map.get(&**v).cloned().unwrap_or_else(|| f.clone()),
            Kind::Implies(a, b) => {
                let (a2, b2) = (self.apply(a), self.apply(b));
                if a2.ptr_eq(a) && b2.ptr_eq(b) {
                    f.clone()
                } else {
                    Formula::implies(a2, b2)
                }
            }
            Kind::Box(a) => {
                let a2 = self.apply(a);
                if a2.ptr_eq(a) {
                    f.clone()
                } else {
                    Formula::boxed(a2)
                }
            }
        };
        // Keep the key alive so its address cannot be reused.
        self.memo.insert(f.ptr(), (f.clone(), out.clone()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::proof::kernel::check;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn prover(n: usize) -> Prover {
        Prover::new(LogicIndex::new(n).unwrap())
    }

    #[test]
    fn regularity_stacks() {
        let mut p = prover(2);
        let t = p.taut(f("p & q -> p")).unwrap();
        for k in 1..=4 {
            let r = p.regularity_k(t, k).unwrap();
            let want = Formula::implies(box_power(k, &f("p & q")), box_power(k, &f("p")));
            assert_eq!(p.formula(r), &want);
            assert_eq!(check(&p.certificate(r)), Ok(()));
        }
    }

    #[test]
    fn box_conjunction_both_ways() {
        let mut p = prover(3);
        for k in 0..4 {
            let parts: Vec<Formula> = (0..k).map(|i| Formula::var(format!("x{i}"))).collect();
            let i = p.box_conj_intro(&parts).unwrap();
            assert_eq!(check(&p.certificate(i)), Ok(()));
            if k > 0 {
                let e = p.box_conj_elim(&parts).unwrap();
                assert_eq!(check(&p.certificate(e)), Ok(()));
            }
        }
    }

    #[test]
    fn box_iff_checks() {
        let mut p = prover(1);
        let t = p.box_iff(&f("p"), &f("box q")).unwrap();
        assert_eq!(p.formula(t), &f("box (p <-> box q) -> (box p <-> box box q)"));
        assert_eq!(check(&p.certificate(t)), Ok(()));
    }

    #[test]
    fn chain_rejects_non_consequence() {
        let mut p = prover(1);
        let t = p.taut(f("p -> p")).unwrap();
        assert!(matches!(p.chain(&[t], f("q")), Err(DeriveError::NotTautology(_))));
    }

    #[test]
    fn instantiate_substitutes_derivation() {
        let mut p = prover(2);
        let t = p.taut(f("q -> q")).unwrap();
        let r = p.regularity(t).unwrap();
        let map: HashMap<String, Formula> = [("q".to_string(), f("box r"))].into();
        let r2 = p.instantiate(r, &map).unwrap();
        assert_eq!(p.formula(r2), &f("box box r -> box box r"));
        assert_eq!(check(&p.certificate(r2)), Ok(()));
    }

    #[test]
    fn pruned_certificate_ends_in_goal() {
        let mut p = prover(1);
        let a = p.taut(f("true")).unwrap();
        let _unused = p.taut(f("p -> p")).unwrap();
        let b = p.nec(a);
        let c = p.certificate(a);
        assert_eq!(c.lines.len(), 1);
        let c = p.certificate(b);
        assert_eq!(c.lines.len(), 2);
        assert_eq!(check(&c), Ok(()));
    }
}
