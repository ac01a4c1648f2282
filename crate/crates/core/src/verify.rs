//! Checking a proposed fixed point, by certificate, by bounded model search,
//! or both.

use std::fmt;

use thiserror::Error;

use crate::formula::{contains_var, substitute, Formula, LogicIndex};
use crate::kripke::{countermodel, Countermodel, KripkeError};
use crate::parse::parse;
use crate::proof::{Certificate, DeriveError, Hole, Prover, Thm};
use crate::simplify::simplify;
use crate::synth::{fixed_point_with, Strategy, SynthError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerifyMethod {
    Cert,
    Kripke,
    Both,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("candidate contains the fixed-point variable {0}")]
    CandidateContainsVar(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertVerdict {
    /// A kernel-checked certificate of `c ↔ A(c)`.
    Ok { strategy: &'static str, certificate: Certificate },
    NoStrategy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KripkeVerdict {
    NoCountermodel { max_worlds: usize },
    Refuted(Countermodel),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub cert: Option<CertVerdict>,
    pub kripke: Option<KripkeVerdict>,
}

impl VerifyReport {
    /// No verdict refutes the candidate and at least one supports it.
    pub fn accepted(&self) -> bool {
        let refuted = matches!(self.kripke, Some(KripkeVerdict::Refuted(_)));
        let certified = matches!(self.cert, Some(CertVerdict::Ok { .. }));
        let searched = matches!(self.kripke, Some(KripkeVerdict::NoCountermodel { .. }));
        !refuted && (certified || searched)
    }
}

impl fmt::Display for CertVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertVerdict::Ok { strategy, certificate } => {
                write!(f, "certificate ok ({strategy}, {} lines)", certificate.lines.len())
            }
            CertVerdict::NoStrategy => f.write_str("no certificate strategy"),
        }
    }
}

impl fmt::Display for KripkeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KripkeVerdict::NoCountermodel { max_worlds } => write!(f, "no countermodel ≤ {max_worlds} worlds"),
            KripkeVerdict::Refuted(c) => write!(f, "countermodel at world {}: {}", c.world, c.model.to_json().trim_end()),
        }
    }
}

/// Checks `candidate ↔ a[p := candidate]` in `wGL_n`.
///
/// The certificate route succeeds when the candidate simplifies to the same
/// formula as one of the constructed fixed points, or to a catalogued
/// provably equivalent form of one.
pub fn verify_fixpoint(
    a: &Formula,
    candidate: &Formula,
    p: &str,
    n: LogicIndex,
    method: VerifyMethod,
    max_worlds: usize,
) -> Result<VerifyReport, VerifyError> {
    if contains_var(candidate, p) {
        return Err(VerifyError::CandidateContainsVar(p.to_string()));
    }
    let cert = match method {
        VerifyMethod::Cert | VerifyMethod::Both => Some(certify(a, candidate, p, n)?),
        VerifyMethod::Kripke => None,
    };
    let kripke = match method {
        VerifyMethod::Kripke | VerifyMethod::Both => {
            let goal = Formula::iff(candidate.clone(), substitute(a, p, candidate));
            Some(match countermodel(&goal, n, max_worlds)? {
                Some(c) => KripkeVerdict::Refuted(c),
                None => KripkeVerdict::NoCountermodel { max_worlds },
            })
        }
        VerifyMethod::Cert => None,
    };
    Ok(VerifyReport { cert, kripke })
}

/// Pairs `(x, y)` with a proof of `x ↔ y` in the given logic.
type Catalogued = fn(&mut Prover) -> Result<Thm, DeriveError>;

fn catalogue(n: LogicIndex) -> Vec<(Formula, Formula, Catalogued)> {
    if n.get() != 3 {
        return vec![];
    }
    let x = parse("box box dia dia true").expect("literal");
    let y = parse("box box dia dia box box false").expect("literal");
    vec![(x, y, Prover::example_two_fixed_points)]
}

fn certify(a: &Formula, c: &Formula, p: &str, n: LogicIndex) -> Result<CertVerdict, VerifyError> {
    let sc = simplify(c);
    let catalogue = catalogue(n);
    for (strategy, name) in [(Strategy::General, "general"), (Strategy::PreferShortcut, "shortcut")] {
        let r = fixed_point_with(a, p, n, strategy, true)?;
        let f = r.fixed_point;
        let fa = r.certificate.expect("certificate requested");
        let sf = simplify(&f);
        if sf == sc {
            let cert = if &f == c {
                Some(fa.clone())
            } else {
                attempt(n, |pr| {
                    let fa = pr.import(&fa, None)?;
                    let cf = simp_bridge(pr, c, &f)?;
                    transport(pr, a, p, c, &f, cf, fa)
                })
            };
            if let Some(certificate) = cert {
                return Ok(CertVerdict::Ok { strategy: name, certificate });
            }
        }
        for (x, y, proof) in &catalogue {
            for (from, to, flip) in [(x, y, false), (y, x, true)] {
                if simplify(from) != sc || simplify(to) != sf {
                    continue;
                }
                let cert = attempt(n, |pr| {
                    let fa = pr.import(&fa, None)?;
                    let mut xy = proof(pr)?;
                    if flip {
                        xy = pr.iff_sym(xy)?;
                    }
                    let c_from = simp_bridge(pr, c, from)?;
                    let to_f = simp_bridge(pr, to, &f)?;
                    let cf = pr.chain(&[c_from, xy, to_f], Formula::iff(c.clone(), f.clone()))?;
                    transport(pr, a, p, c, &f, cf, fa)
                });
                if let Some(certificate) = cert {
                    return Ok(CertVerdict::Ok {
                        strategy: "catalogued-equivalence",
                        certificate,
                    });
                }
            }
        }
    }
    Ok(CertVerdict::NoStrategy)
}

/// Runs a derivation and returns its checked certificate, or `None` if any
/// step fails.
fn attempt<F>(n: LogicIndex, build: F) -> Option<Certificate>
where
    F: FnOnce(&mut Prover) -> Result<Thm, DeriveError>,
{
    let mut pr = Prover::new(n);
    let t = build(&mut pr).ok()?;
    let cert = pr.certificate(t);
    crate::proof::check(&cert).ok()?;
    Some(cert)
}

/// `x ↔ y` for formulas with equal simplifications.
fn simp_bridge(pr: &mut Prover, x: &Formula, y: &Formula) -> Result<Thm, DeriveError> {
    let xs = pr.simplify_equiv(x)?;
    let ys = pr.simplify_equiv(y)?;
    pr.chain(&[xs, ys], Formula::iff(x.clone(), y.clone()))
}

/// From `c ↔ F` and `F ↔ A(F)`, `c ↔ A(c)`.
fn transport(pr: &mut Prover, a: &Formula, p: &str, c: &Formula, f: &Formula, cf: Thm, fa: Thm) -> Result<Thm, DeriveError> {
    let acf = pr.replace_equiv(a, &[Hole::new(p, c.clone(), f.clone())], &[cf])?;
    pr.chain(&[cf, fa, acf], Formula::iff(c.clone(), substitute(a, p, c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(k: usize) -> LogicIndex {
        LogicIndex::new(k).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn synthesized_candidate_certifies() {
        let a = f("~box p");
        let r = fixed_point_with(&a, "p", n(1), Strategy::General, false).unwrap();
        let rep = verify_fixpoint(&a, &r.fixed_point, "p", n(1), VerifyMethod::Both, 3).unwrap();
        assert!(matches!(rep.cert, Some(CertVerdict::Ok { .. })));
        assert_eq!(rep.kripke, Some(KripkeVerdict::NoCountermodel { max_worlds: 3 }));
        assert!(rep.accepted());
    }

    #[test]
    fn simplified_candidate_transports() {
        let a = f("~box p");
        let rep = verify_fixpoint(&a, &f("~box false"), "p", n(1), VerifyMethod::Cert, 3).unwrap();
        let Some(CertVerdict::Ok { certificate, .. }) = rep.cert else {
            panic!("no certificate");
        };
        assert_eq!(certificate.goal, f("~box false <-> ~box ~box false"));
    }

    #[test]
    fn second_fixed_point_of_worked_example() {
        let a = f("box box ~p");
        let c = f("box box dia dia true");
        let rep = verify_fixpoint(&a, &c, "p", n(3), VerifyMethod::Both, 3).unwrap();
        assert!(matches!(
            rep.cert,
            Some(CertVerdict::Ok {
                strategy: "catalogued-equivalence",
                ..
            })
        ));
        assert!(rep.accepted());
    }

    #[test]
    fn wrong_candidate_refuted() {
        let a = f("~box p");
        let rep = verify_fixpoint(&a, &f("box false"), "p", n(1), VerifyMethod::Both, 3).unwrap();
        assert_eq!(rep.cert, Some(CertVerdict::NoStrategy));
        assert!(matches!(rep.kripke, Some(KripkeVerdict::Refuted(_))));
        assert!(!rep.accepted());
    }

    #[test]
    fn candidate_with_p_rejected() {
        let e = verify_fixpoint(&f("box p"), &f("p"), "p", n(2), VerifyMethod::Kripke, 3).unwrap_err();
        assert!(matches!(e, VerifyError::CandidateContainsVar(_)));
    }
}
