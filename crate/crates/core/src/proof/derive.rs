//! Certificate-in, certificate-out entry points for the derived rules. Every
//! certificate returned here has passed [`check`](super::check).

use super::cert::Certificate;
use super::kernel::{check, check_in};
use super::lemmas::{Hole, SubstKind};
use super::prover::{DeriveError, Prover, Thm};
use crate::formula::{Formula, LogicIndex};

fn finish(p: &Prover, t: Thm) -> Result<Certificate, DeriveError> {
    let cert = p.certificate(t);
    check(&cert).map_err(DeriveError::Premise)?;
    Ok(cert)
}

fn load(p: &mut Prover, premise: &Certificate) -> Result<Thm, DeriveError> {
    if premise.logic != p.logic() {
        return Err(DeriveError::LogicMismatch {
            expected: p.logic().get(),
            found: premise.logic.get(),
        });
    }
    check_in(premise, p.logic()).map_err(DeriveError::Premise)?;
    p.import(premise, None)
}

/// `□a → □ⁿ⁺¹a`
pub fn derive_trans(a: &Formula, n: LogicIndex) -> Result<Certificate, DeriveError> {
    let mut p = Prover::new(n);
    let t = p.trans(a)?;
    finish(&p, t)
}

/// From a certificate of `x → y`, one of `□ᵏx → □ᵏy`.
pub fn derive_regularity(premise: &Certificate, k: usize) -> Result<Certificate, DeriveError> {
    let mut p = Prover::new(premise.logic);
    let t = load(&mut p, premise)?;
    let t = p.regularity_k(t, k)?;
    finish(&p, t)
}

/// One of the four substitution lemmas for `context` with the given holes.
pub fn derive_subst(kind: SubstKind, context: &Formula, holes: &[Hole], n: LogicIndex) -> Result<Certificate, DeriveError> {
    let mut p = Prover::new(n);
    let t = p.subst(kind, context, holes)?;
    finish(&p, t)
}

/// From a certificate of `⊞ₙa → a`, one of `a`.
pub fn derive_lob(premise: &Certificate, a: &Formula, n: LogicIndex) -> Result<Certificate, DeriveError> {
    let mut p = Prover::new(n);
    let t = load(&mut p, premise)?;
    let t = p.lob(t, a)?;
    finish(&p, t)
}

/// From a certificate of `□ⁿa → (a ↔ b)`, one of `□a ↔ □b`.
pub fn derive_equiv_box(premise: &Certificate, a: &Formula, b: &Formula, n: LogicIndex) -> Result<Certificate, DeriveError> {
    let mut p = Prover::new(n);
    let t = load(&mut p, premise)?;
    let t = p.equiv_box(t, a, b)?;
    finish(&p, t)
}

/// `f ↔ simplify(f)`, valid in every `wGL_n`.
pub fn derive_simplify_equiv(f: &Formula, n: LogicIndex) -> Result<Certificate, DeriveError> {
    let mut p = Prover::new(n);
    let t = p.simplify_equiv(f)?;
    finish(&p, t)
}

/// `□²◇²⊤ ↔ □²◇²□²⊥` in `wGL₃`.
pub fn derive_two_fixed_points_example() -> Result<Certificate, DeriveError> {
    let mut p = Prover::new(LogicIndex::new(3).expect("3 ≥ 1"));
    let t = p.example_two_fixed_points()?;
    finish(&p, t)
}
