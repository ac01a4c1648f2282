//! Derived rules of `wGL_n`, each expanded into primitive lines.

use std::collections::{BTreeSet, HashMap};

use super::prover::{short, DeriveError, Prover, Substituter, Thm};
use crate::depth::{dep, dep_mod};
use crate::formula::{box_power, boxdot, conj, fresh_var, replace_by_residue, substitute, Formula, Kind};
use crate::simplify::{simplify_box, simplify_implies};

/// Which hypothesis a substitution lemma discharges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubstKind {
    /// `⊞ₙ⁺E → (C(A) ↔ C(B))`
    Plus,
    /// `⊞ₙE → (□C(A) ↔ □C(B))`
    Boxed,
    /// `□ⁱE → (C(A) ↔ C(B))` when the holes sit at one residue `0 < i < n`.
    Residue,
    /// `□ⁿE → (C(A) ↔ C(B))` when the holes sit at residue 0 and never at depth 0.
    Modalized,
}

impl SubstKind {
    pub fn name(self) -> &'static str {
        match self {
            SubstKind::Plus => "plus",
            SubstKind::Boxed => "box",
            SubstKind::Residue => "residue",
            SubstKind::Modalized => "modalized",
        }
    }
}

/// A hole variable of a context together with the two formulas plugged in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hole {
    pub var: String,
    pub left: Formula,
    pub right: Formula,
}

impl Hole {
    pub fn new(var: impl Into<String>, left: Formula, right: Formula) -> Self {
        Hole {
            var: var.into(),
            left,
            right,
        }
    }
}

/// `E = ⋀ (Aⱼ ↔ Bⱼ)`
pub fn hole_equivalence(holes: &[Hole]) -> Formula {
    conj(
        holes
            .iter()
            .map(|h| Formula::iff(h.left.clone(), h.right.clone()))
            .collect::<Vec<_>>(),
    )
}

/// State of one run of the congruence lemma. The hypothesis for a set `S`
/// of box powers is `H_S = ⋀_{s ∈ S} □ˢE`, ascending.
struct Congruence<'h> {
    n: usize,
    holes: &'h [Hole],
    e: Formula,
    left: Substituter<'h>,
    right: Substituter<'h>,
    has_hole: HashMap<usize, (Formula, bool)>,
    memo: HashMap<usize, (Formula, BTreeSet<usize>, Thm)>,
}

impl<'h> Congruence<'h> {
    fn hyp(&self, s: &BTreeSet<usize>) -> Formula {
        conj(s.iter().map(|&k| box_power(k, &self.e)).collect::<Vec<_>>())
    }

    fn has_hole(&mut self, c: &Formula) -> bool {
        if let Some((_, b)) = self.has_hole.get(&c.ptr()) {
            return *b;
        }
        let b = match c.kind() {
            Kind::Falsum => false,
            Kind::Var(v) => self.holes.iter().any(|h| h.var == **v),
            Kind::Implies(a, b) => self.has_hole(a) || self.has_hole(b),
            Kind::Box(a) => self.has_hole(a),
        };
        self.has_hole.insert(c.ptr(), (c.clone(), b));
        b
    }

    /// `H_S → (C(A) ↔ C(B))` together with `S`.
    fn prove(&mut self, p: &mut Prover, c: &Formula) -> Result<(BTreeSet<usize>, Thm), DeriveError> {
        if let Some((_, s, t)) = self.memo.get(&c.ptr()) {
            return Ok((s.clone(), *t));
        }
        let ca = self.left.apply(c);
        let cb = self.right.apply(c);
        let out = if !self.has_hole(c) {
            let t = p.taut(Formula::implies(Formula::top(), Formula::iff(ca.clone(), cb)))?;
            (BTreeSet::new(), t)
        } else if let Some(d) = c.as_box() {
            self.lift(p, d)?
        } else {
            let mut leaves = Vec::new();
            let mut top_hole = false;
            self.layer(c, &mut leaves, &mut top_hole);
            let mut s = BTreeSet::new();
            if top_hole {
                s.insert(0);
            }
            let mut prem = Vec::with_capacity(leaves.len());
            for d in leaves {
                let (sd, t) = self.lift(p, &d)?;
                s.extend(sd);
                prem.push(t);
            }
            let goal = Formula::implies(self.hyp(&s), Formula::iff(ca, cb));
            let t = p.chain(&prem, goal)?;
            (s, t)
        };
        self.memo.insert(c.ptr(), (c.clone(), out.0.clone(), out.1));
        Ok(out)
    }

    /// Bodies of the boxed subformulas containing holes in the
    /// propositional layer of `c`.
    fn layer(&mut self, c: &Formula, leaves: &mut Vec<Formula>, top_hole: &mut bool) {
        match c.kind() {
            Kind::Falsum => {}
            Kind::Var(_) => *top_hole |= self.has_hole(c),
            Kind::Implies(a, b) => {
                self.layer(a, leaves, top_hole);
                self.layer(b, leaves, top_hole);
            }
            Kind::Box(d) => {
                if self.has_hole(d) && !leaves.iter().any(|l| l.ptr_eq(d) || l == d) {
                    leaves.push(d.clone());
                }
            }
        }
    }

    /// From the lemma for `d`, the lemma for `□d`: box powers shift by one,
    /// and `□ⁿ⁺¹E` is folded back to `□E`.
    fn lift(&mut self, p: &mut Prover, d: &Formula) -> Result<(BTreeSet<usize>, Thm), DeriveError> {
        let (sd, td) = self.prove(p, d)?;
        let (da, db) = (self.left.apply(d), self.right.apply(d));
        let r1 = p.regularity(td)?;
        let r2 = p.box_iff(&da, &db)?;
        let parts: Vec<Formula> = sd.iter().map(|&k| box_power(k, &self.e)).collect();
        let r3 = p.box_conj_intro(&parts)?;
        let mut prem = vec![r3, r1, r2];
        let n = self.n;
        if sd.contains(&n) {
            prem.push(p.trans(&self.e)?);
        }
        let s: BTreeSet<usize> = sd.iter().map(|&k| if k + 1 > n { k + 1 - n } else { k + 1 }).collect();
        let goal = Formula::implies(
            self.hyp(&s),
            Formula::iff(Formula::boxed(da), Formula::boxed(db)),
        );
        let t = p.chain(&prem, goal)?;
        Ok((s, t))
    }
}

fn maps(holes: &[Hole]) -> (HashMap<String, Formula>, HashMap<String, Formula>) {
    let l = holes.iter().map(|h| (h.var.clone(), h.left.clone())).collect();
    let r = holes.iter().map(|h| (h.var.clone(), h.right.clone())).collect();
    (l, r)
}

impl Prover {
    /// `□x → □ⁿ⁺¹x`, through one wGL instance on `x ∧ □ⁿx`.
    pub fn trans(&mut self, x: &Formula) -> Result<Thm, DeriveError> {
        let n = self.n();
        let goal = Formula::implies(Formula::boxed(x.clone()), box_power(n + 1, x));
        if let Some(t) = self.lookup(&goal) {
            return Ok(t);
        }
        let bn = box_power(n, x);
        let b2n = box_power(2 * n, x);
        let y = Formula::and(x.clone(), bn.clone());
        let t1 = self.taut(Formula::implies(
            x.clone(),
            Formula::implies(Formula::and(bn.clone(), b2n.clone()), y.clone()),
        ))?;
        let y_x = self.taut(Formula::implies(y.clone(), x.clone()))?;
        let y_bn = self.taut(Formula::implies(y.clone(), bn.clone()))?;
        let a = self.regularity_k(y_x, n)?;
        let b = self.regularity_k(y_bn, n)?;
        let t3 = self.chain(
            &[t1, a, b],
            Formula::implies(x.clone(), Formula::implies(box_power(n, &y), y.clone())),
        )?;
        let t4 = self.regularity(t3)?;
        let t5 = self.axwgl(&y);
        let t6 = self.regularity(y_bn)?;
        self.chain(&[t4, t5, t6], goal)
    }

    /// The congruence lemma: `(S, H_S → (C(A) ↔ C(B)))`, where `S` collects
    /// the hole depths, 0 for depth 0 and `((d−1) mod n) + 1` otherwise.
    pub fn congruence(&mut self, ctx: &Formula, holes: &[Hole]) -> Result<(BTreeSet<usize>, Thm), DeriveError> {
        let (l, r) = maps(holes);
        let mut c = Congruence {
            n: self.n(),
            holes,
            e: hole_equivalence(holes),
            left: Substituter::new(Some(&l)),
            right: Substituter::new(Some(&r)),
            has_hole: HashMap::new(),
            memo: HashMap::new(),
        };
        c.prove(self, ctx)
    }

    /// One of the four substitution lemmas, with its side condition.
    pub fn subst(&mut self, kind: SubstKind, ctx: &Formula, holes: &[Hole]) -> Result<Thm, DeriveError> {
        let n = self.n();
        let e = hole_equivalence(holes);
        let (l, r) = maps(holes);
        let residues = || -> BTreeSet<usize> {
            holes
                .iter()
                .flat_map(|h| dep_mod(ctx, &h.var, self.logic()))
                .collect()
        };
        let (c, hyp) = match kind {
            SubstKind::Plus => (ctx.clone(), boxdot(n, &e, true).expect("n ≥ 1")),
            SubstKind::Boxed => (Formula::boxed(ctx.clone()), boxdot(n, &e, false).expect("n ≥ 1")),
            SubstKind::Residue => {
                let res = residues();
                match res.iter().next() {
                    Some(&i) if res.len() == 1 && i > 0 => (ctx.clone(), box_power(i, &e)),
                    _ => {
                        return Err(DeriveError::SideCondition {
                            kind: kind.name(),
                            residues: res,
                        })
                    }
                }
            }
            SubstKind::Modalized => {
                let res = residues();
                let at_root = holes.iter().any(|h| dep(ctx, &h.var).contains(&0));
                if res.len() > 1 || res.iter().any(|&i| i != 0) || at_root {
                    return Err(DeriveError::SideCondition {
                        kind: kind.name(),
                        residues: res,
                    });
                }
                (ctx.clone(), box_power(n, &e))
            }
        };
        let (_, t) = self.congruence(&c, holes)?;
        let goal = Formula::implies(
            hyp,
            Formula::iff(crate::formula::substitute_all(&c, &l), crate::formula::substitute_all(&c, &r)),
        );
        self.chain(&[t], goal)
    }

    /// From proofs of `Aⱼ ↔ Bⱼ`, `C(A) ↔ C(B)`.
    pub fn replace_equiv(&mut self, ctx: &Formula, holes: &[Hole], eqs: &[Thm]) -> Result<Thm, DeriveError> {
        let (l, r) = maps(holes);
        let ca = crate::formula::substitute_all(ctx, &l);
        let cb = crate::formula::substitute_all(ctx, &r);
        if ca == cb {
            return self.taut(Formula::iff(ca.clone(), cb));
        }
        let (s, t) = self.congruence(ctx, holes)?;
        let e = hole_equivalence(holes);
        let et = self.chain(eqs, e.clone())?;
        let parts: Vec<Thm> = s.iter().map(|&k| self.nec_k(et, k)).collect();
        let hyp = conj(s.iter().map(|&k| box_power(k, &e)).collect::<Vec<_>>());
        let h = self.chain(&parts, hyp)?;
        self.mp(h, t)
    }

    pub fn iff_sym(&mut self, t: Thm) -> Result<Thm, DeriveError> {
        let (a, b) = self
            .formula(t)
            .as_iff()
            .map(|(a, b)| (a.clone(), b.clone()))
            .ok_or_else(|| DeriveError::Shape("expected an equivalence".into()))?;
        self.chain(&[t], Formula::iff(b, a))
    }

    /// From `x ↔ y`, `□x ↔ □y`.
    pub fn box_lift(&mut self, t: Thm) -> Result<Thm, DeriveError> {
        let (a, b) = self
            .formula(t)
            .as_iff()
            .map(|(a, b)| (a.clone(), b.clone()))
            .ok_or_else(|| DeriveError::Shape("expected an equivalence".into()))?;
        let boxed = self.nec(t);
        let bi = self.box_iff(&a, &b)?;
        self.mp(boxed, bi)
    }

    /// From `⊞ₙa → a`, `a`.
    pub fn lob(&mut self, premise: Thm, a: &Formula) -> Result<Thm, DeriveError> {
        let n = self.n();
        let bd = boxdot(n, a, false).expect("n ≥ 1");
        let want = Formula::implies(bd.clone(), a.clone());
        if self.formula(premise) != &want {
            return Err(DeriveError::Shape(format!(
                "premise of the Löb rule must be {}, got {}",
                short(&want),
                short(self.formula(premise))
            )));
        }
        let bp = |k: usize| box_power(k, a);
        let range = |lo: usize, hi: usize| conj((lo..=hi).map(bp).collect::<Vec<_>>());
        let plus_parts: Vec<Formula> = (0..=n).map(bp).collect();
        let plus = conj(plus_parts.clone());

        // P_k : □^{k+1}a ∧ … ∧ □ⁿa → ⊞ₙ⁺a
        let mut pk = self.chain(&[premise], Formula::implies(range(1, n), plus.clone()))?;
        for k in 0..n.saturating_sub(1) {
            let reg = self.regularity(pk)?;
            let intro = self.box_conj_intro(&(k + 1..=n).map(bp).collect::<Vec<_>>())?;
            let elim = self.box_conj_elim(&plus_parts)?;
            let q = self.chain(
                &[pk],
                Formula::implies(range(k + 1, n - 1), Formula::implies(bp(n), a.clone())),
            )?;
            let qreg = self.regularity(q)?;
            let qintro = self.box_conj_intro(&(k + 1..n).map(bp).collect::<Vec<_>>())?;
            let ax = self.axwgl(a);
            let tr = self.trans(a)?;
            pk = self.chain(
                &[reg, intro, elim, premise, qreg, qintro, ax, tr],
                Formula::implies(range(k + 2, n), plus.clone()),
            )?;
        }
        let close = self.chain(&[pk], Formula::implies(bp(n), a.clone()))?;
        let boxed = self.nec(close);
        let ax = self.axwgl(a);
        let ba = self.mp(boxed, ax)?;
        let bna = self.nec_k(ba, n - 1);
        self.mp(bna, close)
    }

    /// From `□ⁿa → (a ↔ b)`, `□a ↔ □b`.
    pub fn equiv_box(&mut self, premise: Thm, a: &Formula, b: &Formula) -> Result<Thm, DeriveError> {
        let n = self.n();
        let bna = box_power(n, a);
        let want = Formula::implies(bna.clone(), Formula::iff(a.clone(), b.clone()));
        if self.formula(premise) != &want {
            return Err(DeriveError::Shape(format!(
                "premise must be {}, got {}",
                short(&want),
                short(self.formula(premise))
            )));
        }
        let f1 = self.chain(&[premise], Formula::implies(a.clone(), Formula::implies(bna.clone(), b.clone())))?;
        let r1 = self.regularity(f1)?;
        let k = self.axk(&bna, b);
        let tr = self.trans(a)?;
        let fwd = self.chain(
            &[r1, k, tr],
            Formula::implies(Formula::boxed(a.clone()), Formula::boxed(b.clone())),
        )?;
        let b1 = self.chain(&[premise], Formula::implies(b.clone(), Formula::implies(bna, a.clone())))?;
        let r2 = self.regularity(b1)?;
        let ax = self.axwgl(a);
        let bwd = self.chain(
            &[r2, ax],
            Formula::implies(Formula::boxed(b.clone()), Formula::boxed(a.clone())),
        )?;
        self.chain(
            &[fwd, bwd],
            Formula::iff(Formula::boxed(a.clone()), Formula::boxed(b.clone())),
        )
    }

    /// `⊤ ↔ □⊤`
    fn top_box_top(&mut self) -> Result<Thm, DeriveError> {
        let top = self.taut(Formula::top())?;
        let bt = self.nec(top);
        self.chain(&[bt], Formula::iff(Formula::top(), Formula::boxed(Formula::top())))
    }

    /// `□A(⊤) ↔ □A(□A(⊤))` for `boxed = □A` with every `p` at residue 0.
    pub fn fp1(&mut self, boxed: &Formula, p: &str) -> Result<Thm, DeriveError> {
        let a = boxed
            .as_box()
            .ok_or_else(|| DeriveError::Shape(format!("expected a boxed formula, got {}", short(boxed))))?;
        let res = dep_mod(boxed, p, self.logic());
        if res.iter().any(|&r| r != 0) {
            return Err(DeriveError::SideCondition { kind: "fp1", residues: res });
        }
        let n = self.n();
        let at = substitute(a, p, &Formula::top());
        let fp = Formula::boxed(at.clone());
        let af = substitute(a, p, &fp);
        if res.is_empty() {
            return self.taut(Formula::iff(fp.clone(), fp));
        }
        let t1 = self.taut(Formula::implies(at.clone(), Formula::iff(Formula::top(), at.clone())))?;
        let t1n = self.regularity_k(t1, n)?;
        let ctx = substitute(a, p, &Formula::boxed(Formula::var(p)));
        let (_, tc) = self.congruence(&ctx, &[Hole::new(p, Formula::top(), at.clone())])?;
        let tbt = self.top_box_top()?;
        let re = self.replace_equiv(a, &[Hole::new(p, Formula::top(), Formula::boxed(Formula::top()))], &[tbt])?;
        let prem = self.chain(
            &[t1n, tc, re],
            Formula::implies(box_power(n, &at), Formula::iff(at.clone(), af.clone())),
        )?;
        self.equiv_box(prem, &at, &af)
    }

    /// `Gⁿ(⊤) ↔ G(Gⁿ(⊤))` for `G = boxed` with every `p` at one residue.
    pub fn thm2(&mut self, boxed: &Formula, p: &str) -> Result<Thm, DeriveError> {
        let a = boxed
            .as_box()
            .ok_or_else(|| DeriveError::Shape(format!("expected a boxed formula, got {}", short(boxed))))?
            .clone();
        let res = dep_mod(boxed, p, self.logic());
        if res.len() != 1 {
            return Err(DeriveError::SideCondition { kind: "thm2", residues: res });
        }
        let n = self.n();
        let top = Formula::top();
        let pv = Formula::var(p);
        let gpow = |k: usize| crate::formula::iterate(boxed, p, k);
        let at = |k: usize| substitute(&gpow(k), p, &top);
        let gn = gpow(n);
        let claim = self.fp1(&gn, p)?; // Gⁿ(⊤) ↔ G²ⁿ(⊤)
        let d = substitute(&a, p, &at(n));
        let c = substitute(&a, p, &substitute(&gpow(n - 1), p, &Formula::boxed(pv.clone())));
        let c_top = substitute(&c, p, &top);
        let t1 = self.taut(Formula::implies(d.clone(), Formula::iff(top.clone(), d.clone())))?;
        let t1n = self.regularity_k(t1, n)?;
        let (_, tc) = self.congruence(&c, &[Hole::new(p, top.clone(), d.clone())])?;
        let sym = self.iff_sym(claim)?;
        let re = self.replace_equiv(&a, &[Hole::new(p, at(2 * n), at(n))], &[sym])?;
        let prem = self.chain(
            &[t1n, tc, re],
            Formula::implies(box_power(n, &d), Formula::iff(d.clone(), c_top.clone())),
        )?;
        let eb = self.equiv_box(prem, &d, &c_top)?;
        let tbt = self.top_box_top()?;
        let re2 = self.replace_equiv(&gn, &[Hole::new(p, top.clone(), Formula::boxed(Formula::top()))], &[tbt])?;
        self.chain(&[eb, re2], Formula::iff(at(n), at(n + 1)))
    }

    /// From `F ↔ Z(F)` with `Z` the 0-instance of `boxed`, `F ↔ boxed(F)`.
    pub fn zero_instance_lift(&mut self, f: &Formula, boxed: &Formula, p: &str, t: Thm) -> Result<Thm, DeriveError> {
        let n = self.n();
        let goal = Formula::iff(f.clone(), substitute(boxed, p, f));
        if self.formula(t) == &goal {
            return Ok(t);
        }
        let q = fresh_var([boxed, f]);
        let qv = Formula::var(&q);
        let bq = replace_by_residue(boxed, p, 0, n, &qv);
        let x = substitute(&bq, p, f);
        let zf = substitute(&x, &q, &Formula::top());
        let want = Formula::iff(f.clone(), zf.clone());
        if self.formula(t) != &want {
            return Err(DeriveError::Shape(format!(
                "expected {}, got {}",
                short(&want),
                short(self.formula(t))
            )));
        }
        let fp = self.fp1(&x, &q)?;
        let sym = self.chain(&[t], Formula::iff(zf.clone(), f.clone()))?;
        let re = self.replace_equiv(&x, &[Hole::new(&q, zf, f.clone())], &[sym])?;
        self.chain(&[t, fp, re], goal)
    }

    /// From `F ↔ seq[last](F)`, `F ↔ seq[0](F)`, where `seq` is a shifting
    /// sequence of `seq[0]` starting at `shift`.
    pub fn shifting_lift(&mut self, seq: &[Formula], shift: usize, p: &str, f: &Formula, t: Thm) -> Result<Thm, DeriveError> {
        let n = self.n();
        let base = &seq[0];
        let goal = Formula::iff(f.clone(), substitute(base, p, f));
        let last = seq.len() - 1;
        let want = Formula::iff(f.clone(), substitute(&seq[last], p, f));
        if self.formula(t) != &want {
            return Err(DeriveError::Shape(format!(
                "expected {}, got {}",
                short(&want),
                short(self.formula(t))
            )));
        }
        if last == 0 {
            return Ok(t);
        }
        let bf = substitute(base, p, f);
        let e = Formula::iff(f.clone(), bf.clone());
        let h = boxdot(n, &e, false).expect("n ≥ 1");
        let q = fresh_var(seq.iter().chain([f]));
        let qv = Formula::var(&q);
        let mut prem = Vec::with_capacity(last + 1);
        for (j, s) in seq.iter().enumerate().take(last) {
            let ctx = replace_by_residue(s, p, (shift + j) % n, n, &qv);
            let x = substitute(&ctx, p, f);
            let (_, tc) = self.congruence(&x, &[Hole::new(&q, f.clone(), bf.clone())])?;
            let goal_j = Formula::implies(
                h.clone(),
                Formula::iff(substitute(s, p, f), substitute(&seq[j + 1], p, f)),
            );
            prem.push(self.chain(&[tc], goal_j)?);
        }
        prem.push(t);
        let step = self.chain(&prem, Formula::implies(h, e.clone()))?;
        let out = self.lob(step, &e)?;
        debug_assert_eq!(self.formula(out), &goal);
        Ok(out)
    }

    /// `f ↔ simplify(f)`
    pub fn simplify_equiv(&mut self, f: &Formula) -> Result<Thm, DeriveError> {
        let mut memo: HashMap<usize, (Formula, Formula, Thm)> = HashMap::new();
        self.simplify_equiv_memo(f, &mut memo).map(|(_, t)| t)
    }

    fn simplify_equiv_memo(
        &mut self,
        f: &Formula,
        memo: &mut HashMap<usize, (Formula, Formula, Thm)>,
    ) -> Result<(Formula, Thm), DeriveError> {
        if let Some((_, s, t)) = memo.get(&f.ptr()) {
            return Ok((s.clone(), *t));
        }
        let (s, t) = match f.kind() {
            Kind::Falsum | Kind::Var(_) => (f.clone(), self.taut(Formula::iff(f.clone(), f.clone()))?),
            Kind::Implies(a, b) => {
                let (sa, ta) = self.simplify_equiv_memo(a, memo)?;
                let (sb, tb) = self.simplify_equiv_memo(b, memo)?;
                let s = simplify_implies(sa.clone(), sb.clone());
                let t = self.chain(&[ta, tb], Formula::iff(f.clone(), s.clone()))?;
                (s, t)
            }
            Kind::Box(a) => {
                let (sa, ta) = self.simplify_equiv_memo(a, memo)?;
                let lifted = self.box_lift(ta)?;
                let s = simplify_box(sa.clone());
                let t = if s.is_top() && !Formula::boxed(sa.clone()).is_top() {
                    let top = self.taut(Formula::top())?;
                    let bt = self.nec(top);
                    self.chain(&[lifted, bt], Formula::iff(f.clone(), s.clone()))?
                } else {
                    self.chain(&[lifted], Formula::iff(f.clone(), s.clone()))?
                };
                (s, t)
            }
        };
        memo.insert(f.ptr(), (f.clone(), s.clone(), t));
        Ok((s, t))
    }

    /// From `x → y`, `◇x → ◇y`.
    pub fn dia_mono(&mut self, t: Thm) -> Result<Thm, DeriveError> {
        let (x, y) = self
            .formula(t)
            .as_implies()
            .map(|(x, y)| (x.clone(), y.clone()))
            .ok_or_else(|| DeriveError::Shape("expected an implication".into()))?;
        let c = self.chain(&[t], Formula::implies(Formula::not(y.clone()), Formula::not(x.clone())))?;
        let r = self.regularity(c)?;
        self.chain(&[r], Formula::implies(Formula::dia(x), Formula::dia(y)))
    }

    pub fn dia_mono_k(&mut self, t: Thm, k: usize) -> Result<Thm, DeriveError> {
        let mut cur = t;
        for _ in 0..k {
            cur = self.dia_mono(cur)?;
        }
        Ok(cur)
    }

    /// `◇ᵏb ∧ □ᵏc → ◇ᵏ(b ∧ c)`
    pub fn dia_box_k(&mut self, b: &Formula, c: &Formula, k: usize) -> Result<Thm, DeriveError> {
        let dk = |k: usize, x: &Formula| (0..k).fold(x.clone(), |acc, _| Formula::dia(acc));
        let bc = Formula::and(b.clone(), c.clone());
        if k == 0 {
            return self.taut(Formula::implies(Formula::and(b.clone(), c.clone()), bc));
        }
        // ◇B' ∧ □C' → ◇(B' ∧ C') with B' = ◇ᵏ⁻¹b, C' = □ᵏ⁻¹c.
        let b1 = dk(k - 1, b);
        let c1 = box_power(k - 1, c);
        let b1c1 = Formula::and(b1.clone(), c1.clone());
        let t = self.taut(Formula::implies(
            c1.clone(),
            Formula::implies(Formula::not(b1c1.clone()), Formula::not(b1.clone())),
        ))?;
        let r = self.regularity(t)?;
        let kx = self.axk(&Formula::not(b1c1.clone()), &Formula::not(b1.clone()));
        let step = self.chain(
            &[r, kx],
            Formula::implies(
                Formula::and(Formula::dia(b1.clone()), Formula::boxed(c1.clone())),
                Formula::dia(b1c1),
            ),
        )?;
        let ih = self.dia_box_k(b, c, k - 1)?;
        let lifted = self.dia_mono(ih)?;
        self.chain(
            &[step, lifted],
            Formula::implies(Formula::and(dk(k, b), box_power(k, c)), dk(k, &bc)),
        )
    }

    /// `□ᵏ¬x → ¬◇ᵏx`
    pub fn box_not_dia(&mut self, x: &Formula, k: usize) -> Result<Thm, DeriveError> {
        let dk = |k: usize| (0..k).fold(x.clone(), |acc, _| Formula::dia(acc));
        if k == 0 {
            return self.taut(Formula::implies(Formula::not(x.clone()), Formula::not(x.clone())));
        }
        let ih = self.box_not_dia(x, k - 1)?;
        let r = self.regularity(ih)?;
        self.chain(
            &[r],
            Formula::implies(box_power(k, &Formula::not(x.clone())), Formula::not(dk(k))),
        )
    }

    /// `□ᵏx₁ ∧ … ∧ □ᵏxₘ → □ᵏ(x₁ ∧ … ∧ xₘ)`
    pub fn box_k_conj_intro(&mut self, parts: &[Formula], k: usize) -> Result<Thm, DeriveError> {
        let goal = Formula::implies(
            conj(parts.iter().map(|x| box_power(k, x)).collect::<Vec<_>>()),
            box_power(k, &conj(parts.to_vec())),
        );
        if k == 0 {
            return self.taut(goal);
        }
        let inner = self.box_conj_intro(parts)?;
        let lifted: Vec<Formula> = parts.iter().map(|x| Formula::boxed(x.clone())).collect();
        let rest = self.box_k_conj_intro(&lifted, k - 1)?;
        let reg = self.regularity_k(inner, k - 1)?;
        self.chain(&[rest, reg], goal)
    }

    /// `¬□y ↔ ◇¬y`
    fn not_box(&mut self, y: &Formula) -> Result<Thm, DeriveError> {
        let nn = self.taut(Formula::iff(y.clone(), Formula::not(Formula::not(y.clone()))))?;
        let l = self.box_lift(nn)?;
        self.chain(
            &[l],
            Formula::iff(Formula::not(Formula::boxed(y.clone())), Formula::dia(Formula::not(y.clone()))),
        )
    }

    /// From `x ↔ y`, `◇x ↔ ◇y`.
    fn dia_lift(&mut self, t: Thm) -> Result<Thm, DeriveError> {
        let (x, y) = self
            .formula(t)
            .as_iff()
            .map(|(x, y)| (x.clone(), y.clone()))
            .ok_or_else(|| DeriveError::Shape("expected an equivalence".into()))?;
        let neg = self.chain(&[t], Formula::iff(Formula::not(x.clone()), Formula::not(y.clone())))?;
        let l = self.box_lift(neg)?;
        self.chain(&[l], Formula::iff(Formula::dia(x), Formula::dia(y)))
    }

    /// `□²◇²⊤ ↔ □²◇²□²⊥` in `wGL₃`: two distinct fixed points of `□²¬p`
    /// are provably equivalent.
    pub fn example_two_fixed_points(&mut self) -> Result<Thm, DeriveError> {
        if self.n() != 3 {
            return Err(DeriveError::LogicMismatch {
                expected: 3,
                found: self.n(),
            });
        }
        let top = Formula::top();
        let bot = Formula::falsum();
        let dia = Formula::dia;
        let bx = |k: usize, x: &Formula| box_power(k, x);
        let pp = dia(dia(top.clone())); // ◇²⊤
        let lhs = bx(2, &pp);
        let b2bot = bx(2, &bot);
        let rhs = bx(2, &dia(dia(b2bot.clone())));

        // (←)
        let t = self.taut(Formula::implies(b2bot.clone(), top.clone()))?;
        let t = self.dia_mono_k(t, 2)?;
        let bwd = self.regularity_k(t, 2)?;

        // (→) D = ◇²⊤ ∧ □²◇²⊤ ∧ □³◇²⊤, and D → ◇³D.
        let d = conj([pp.clone(), bx(2, &pp), bx(3, &pp)]);
        let tr5 = self.trans(&bx(1, &pp))?; // □²P → □⁵P
        let tr6 = self.trans(&bx(2, &pp))?; // □³P → □⁶P
        let c_parts = [pp.clone(), bx(1, &pp), bx(3, &pp), bx(4, &pp)];
        let c = conj(c_parts.clone());
        let box2c = self.box_k_conj_intro(&c_parts, 2)?;
        let db = self.dia_box_k(&top, &c, 2)?; // ◇²⊤ ∧ □²C → ◇²(⊤ ∧ C)
        let drop_top = self.taut(Formula::implies(Formula::and(top.clone(), c.clone()), c.clone()))?;
        let drop_top = self.dia_mono_k(drop_top, 2)?;
        // C → ◇D
        let box_d = self.box_conj_intro(&[pp.clone(), bx(2, &pp), bx(3, &pp)])?;
        let dtop = dia(top.clone());
        let db1 = self.dia_box_k(&dtop, &d, 1)?;
        let drop1 = self.taut(Formula::implies(Formula::and(dtop.clone(), d.clone()), d.clone()))?;
        let drop1 = self.dia_mono(drop1)?;
        let c_to_dd = self.chain(&[box_d, db1, drop1], Formula::implies(c.clone(), dia(d.clone())))?;
        let c2 = self.dia_mono_k(c_to_dd, 2)?;
        let d3 = dia(dia(dia(d.clone())));
        let d_to_d3 = self.chain(
            &[tr5, tr6, box2c, db, drop_top, c2],
            Formula::implies(d.clone(), d3.clone()),
        )?;
        let nd = Formula::not(d.clone());
        let bnd = self.box_not_dia(&d, 3)?;
        let prem = self.chain(
            &[d_to_d3, bnd],
            Formula::implies(boxdot(3, &nd, false).expect("n ≥ 1"), nd.clone()),
        )?;
        let not_d = self.lob(prem, &nd)?;

        // □²P ∧ ◇²□²P → ◇²D, hence □²P → ¬◇²□²P.
        let b2p = bx(2, &pp);
        let rest = Formula::and(pp.clone(), bx(3, &pp));
        let box2rest = self.box_k_conj_intro(&[pp.clone(), bx(3, &pp)], 2)?;
        let db2 = self.dia_box_k(&b2p, &rest, 2)?;
        let into_d = self.taut(Formula::implies(Formula::and(b2p.clone(), rest.clone()), d.clone()))?;
        let into_d = self.dia_mono_k(into_d, 2)?;
        let nn = self.nec_k(not_d, 2);
        let bnd2 = self.box_not_dia(&d, 2)?;
        let d2b2p = dia(dia(b2p.clone()));
        let step = self.chain(
            &[tr5, box2rest, db2, into_d, nn, bnd2],
            Formula::implies(b2p.clone(), Formula::not(d2b2p.clone())),
        )?;

        // ¬◇²□²P ↔ □²◇²□²⊥
        let u1 = self.taut(Formula::iff(
            Formula::not(d2b2p.clone()),
            Formula::boxed(Formula::not(dia(b2p.clone()))),
        ))?;
        let u2 = self.taut(Formula::iff(Formula::not(dia(b2p.clone())), Formula::boxed(Formula::not(b2p.clone()))))?;
        let u2 = self.box_lift(u2)?; // □¬◇□²P ↔ □□¬□²P
        // ¬□²P ↔ ◇◇□²⊥
        let v1 = self.not_box(&bx(1, &pp))?; // ¬□□P ↔ ◇¬□P
        let v2 = self.not_box(&pp)?; // ¬□P ↔ ◇¬P
        let w1 = self.taut(Formula::iff(Formula::not(pp.clone()), Formula::boxed(Formula::not(dtop.clone()))))?;
        let w2 = self.taut(Formula::iff(Formula::not(dtop.clone()), Formula::boxed(Formula::not(top.clone()))))?;
        let w3 = self.taut(Formula::iff(Formula::not(top.clone()), bot.clone()))?;
        let w3 = self.box_lift(w3)?; // □¬⊤ ↔ □⊥
        let w2 = self.chain(&[w2, w3], Formula::iff(Formula::not(dtop.clone()), bx(1, &bot)))?;
        let w2 = self.box_lift(w2)?; // □¬◇⊤ ↔ □²⊥
        let w = self.chain(&[w1, w2], Formula::iff(Formula::not(pp.clone()), b2bot.clone()))?;
        let w = self.dia_lift(w)?; // ◇¬P ↔ ◇□²⊥
        let v = self.chain(&[v2, w], Formula::iff(Formula::not(bx(1, &pp)), dia(b2bot.clone())))?;
        let v = self.dia_lift(v)?;
        let v = self.chain(&[v1, v], Formula::iff(Formula::not(b2p.clone()), dia(dia(b2bot.clone()))))?;
        let v = self.box_lift(v)?;
        let v = self.box_lift(v)?; // □□¬□²P ↔ □²◇²□²⊥
        let fwd = self.chain(&[step, u1, u2, v], Formula::implies(lhs.clone(), rhs.clone()))?;
        self.chain(&[fwd, bwd], Formula::iff(lhs, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::LogicIndex;
    use crate::parse::parse;
    use crate::proof::kernel::check;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn prover(n: usize) -> Prover {
        Prover::new(LogicIndex::new(n).unwrap())
    }

    fn checked(p: &Prover, t: Thm) {
        let c = p.certificate(t);
        assert_eq!(check(&c), Ok(()), "{}", short(&c.goal));
    }

    #[test]
    fn trans_small_cases() {
        for n in 1..=3 {
            let mut p = prover(n);
            let t = p.trans(&f("q")).unwrap();
            assert_eq!(p.formula(t), &Formula::implies(f("box q"), box_power(n + 1, &f("q"))));
            checked(&p, t);
        }
        let mut p = prover(3);
        let t = p.trans(&Formula::falsum()).unwrap();
        assert_eq!(p.formula(t), &f("box false -> box box box box false"));
        checked(&p, t);
    }

    #[test]
    fn congruence_depth_sets() {
        let mut p = prover(2);
        let holes = [Hole::new("x", f("a"), f("b"))];
        let (s, t) = p.congruence(&f("x & box (x -> box box x)"), &holes).unwrap();
        // depths 0, 1, 3 → 0, 1, 1
        assert_eq!(s, [0, 1].into());
        checked(&p, t);
        let (s, t) = p.congruence(&f("box box x"), &holes).unwrap();
        assert_eq!(s, [2].into());
        checked(&p, t);
        let (s, t) = p.congruence(&f("box box box x"), &holes).unwrap();
        assert_eq!(s, [1].into());
        checked(&p, t);
    }

    #[test]
    fn subst_kinds() {
        let mut p = prover(3);
        let holes = [Hole::new("x", f("a"), f("box b"))];
        let t = p.subst(SubstKind::Plus, &f("box x"), &holes).unwrap();
        assert_eq!(
            p.formula(t),
            &Formula::implies(
                boxdot(3, &f("a <-> box b"), true).unwrap(),
                f("box a <-> box box b")
            )
        );
        checked(&p, t);
        let t = p.subst(SubstKind::Boxed, &f("x -> box x"), &holes).unwrap();
        checked(&p, t);
        let t = p.subst(SubstKind::Residue, &f("box (c -> box box box box x)"), &holes).unwrap();
        assert_eq!(p.formula(t).as_implies().unwrap().0, &box_power(2, &f("a <-> box b")));
        checked(&p, t);
        let t = p.subst(SubstKind::Modalized, &f("box box box x"), &holes).unwrap();
        checked(&p, t);
        assert!(matches!(
            p.subst(SubstKind::Residue, &f("box box box x"), &holes),
            Err(DeriveError::SideCondition { .. })
        ));
        assert!(matches!(
            p.subst(SubstKind::Modalized, &f("x & box box box x"), &holes),
            Err(DeriveError::SideCondition { .. })
        ));
    }

    #[test]
    fn lob_on_tautology() {
        for n in 1..=3 {
            let mut p = prover(n);
            let a = Formula::top();
            let prem = p
                .taut(Formula::implies(boxdot(n, &a, false).unwrap(), a.clone()))
                .unwrap();
            let t = p.lob(prem, &a).unwrap();
            assert_eq!(p.formula(t), &a);
            checked(&p, t);
        }
    }

    #[test]
    fn equiv_box_reflexive() {
        let mut p = prover(2);
        let a = f("q & box r");
        let prem = p
            .taut(Formula::implies(box_power(2, &a), Formula::iff(a.clone(), a.clone())))
            .unwrap();
        let t = p.equiv_box(prem, &a, &a).unwrap();
        assert_eq!(p.formula(t), &f("box (q & box r) <-> box (q & box r)"));
        checked(&p, t);
        let bad = p.taut(f("p -> p")).unwrap();
        assert!(p.equiv_box(bad, &a, &a).is_err());
    }

    #[test]
    fn fp1_and_thm2() {
        let mut p = prover(3);
        let t = p.fp1(&f("box (box box ~p -> q)"), "p").unwrap();
        checked(&p, t);
        let mut p = prover(2);
        assert!(matches!(p.fp1(&f("box (box box ~p -> q)"), "p"), Err(DeriveError::SideCondition { .. })));
        let mut p = prover(3);
        let g = f("box box ~p");
        let t = p.thm2(&g, "p").unwrap();
        let g3 = crate::formula::substitute(&crate::formula::iterate(&g, "p", 3), "p", &Formula::top());
        let g4 = crate::formula::substitute(&g, "p", &g3);
        assert_eq!(p.formula(t), &Formula::iff(g3, g4));
        checked(&p, t);
    }

    #[test]
    fn simplify_equivalence() {
        let mut p = prover(1);
        let x = f("~box ~true & (false -> q) & box box true");
        let t = p.simplify_equiv(&x).unwrap();
        assert_eq!(p.formula(t), &Formula::iff(x.clone(), crate::simplify::simplify(&x)));
        checked(&p, t);
    }

    #[test]
    fn worked_example() {
        let mut p = prover(3);
        let t = p.example_two_fixed_points().unwrap();
        assert_eq!(p.formula(t), &f("box box dia dia true <-> box box dia dia box box false"));
        checked(&p, t);
    }
}
