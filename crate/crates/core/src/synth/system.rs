//! Reductions: modalized formulas to boxed systems, and systems to single
//! boxed equations.

use std::collections::{BTreeSet, HashMap};

use super::{expect_boxed, solve_boxed, FixedPointResult, Method, Strategy, SynthError, SynthTrace};
use crate::depth::is_modalized;
use crate::formula::{atoms, fresh_vars, substitute, substitute_all, Formula, Kind, LogicIndex};
use crate::print::print;
use crate::proof::{check, Certificate, DeriveError, Hole, Prover, Thm};

/// `a = skeleton[vars := parts]`, with `skeleton` box-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub skeleton: Formula,
    pub vars: Vec<String>,
    pub parts: Vec<Formula>,
}

/// Abstracts every maximal boxed subformula of `a` by a fresh variable.
/// Equal subformulas share a variable; variables are numbered by leftmost
/// first occurrence.
pub fn decompose(a: &Formula, p: &str) -> Result<Decomposition, SynthError> {
    if !is_modalized(a, p) {
        return Err(SynthError::NotModalized(p.to_string()));
    }
    let mut parts: Vec<Formula> = Vec::new();
    collect_boxes(a, &mut parts);
    let vars = fresh_vars([a], parts.len());
    let index: HashMap<Formula, usize> = parts.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    let skeleton = abstract_boxes(a, &index, &vars);
    Ok(Decomposition { skeleton, vars, parts })
}

fn collect_boxes(a: &Formula, out: &mut Vec<Formula>) {
    match a.kind() {
        Kind::Falsum | Kind::Var(_) => {}
        Kind::Implies(l, r) => {
            collect_boxes(l, out);
            collect_boxes(r, out);
        }
        Kind::Box(_) => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
    }
}

fn abstract_boxes(a: &Formula, index: &HashMap<Formula, usize>, vars: &[String]) -> Formula {
    match a.kind() {
        Kind::Falsum | Kind::Var(_) => a.clone(),
        Kind::Implies(l, r) => Formula::implies(abstract_boxes(l, index, vars), abstract_boxes(r, index, vars)),
        Kind::Box(_) => Formula::var(&vars[index[a]]),
    }
}

pub(crate) fn checked(p: &Prover, t: Thm) -> Result<Certificate, SynthError> {
    let cert = p.certificate(t);
    check(&cert).map_err(SynthError::Kernel)?;
    Ok(cert)
}

fn validate_system(system: &[Formula], vars: &[String]) -> Result<(), SynthError> {
    if system.len() != vars.len() || system.is_empty() {
        return Err(SynthError::Arity {
            equations: system.len(),
            vars: vars.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(SynthError::DuplicateVar(v.clone()));
        }
    }
    for s in system {
        expect_boxed(s)?;
    }
    Ok(())
}

/// Solves `pᵢ ↔ systemᵢ(p₁, …, pₘ)` by recursion on `m`: the first `m−1`
/// equations are solved with `pₘ` as a parameter, the last equation is then
/// a single boxed equation in `pₘ`, and its solution is substituted back.
/// With a prover, also proves `Fᵢ ↔ systemᵢ(F₁, …, Fₘ)` for each `i`.
fn solve_system(
    system: &[Formula],
    vars: &[String],
    n: LogicIndex,
    strategy: Strategy,
    mut prover: Option<&mut Prover>,
) -> Result<(Vec<Formula>, Option<Vec<Thm>>), SynthError> {
    let m = system.len();
    if m == 1 {
        let (f, _, _, t) = solve_boxed(&system[0], &vars[0], n, strategy, prover)?;
        return Ok((vec![f], t.map(|t| vec![t])));
    }
    let last = &vars[m - 1];
    let (partial, thms) = solve_system(&system[..m - 1], &vars[..m - 1], n, strategy, prover.as_deref_mut())?;
    let inner: HashMap<String, Formula> = vars[..m - 1].iter().cloned().zip(partial.iter().cloned()).collect();
    let h = substitute_all(&system[m - 1], &inner);
    let (f, _, _, th) = solve_boxed(&h, last, n, strategy, prover.as_deref_mut())?;
    let mut sols: Vec<Formula> = partial.iter().map(|g| substitute(g, last, &f)).collect();
    sols.push(f.clone());
    let proofs = match (prover, thms, th) {
        (Some(pr), Some(thms), Some(th)) => {
            let map: HashMap<String, Formula> = [(last.clone(), f.clone())].into();
            let mut out = Vec::with_capacity(m);
            for t in thms {
                out.push(pr.instantiate(t, &map)?);
            }
            out.push(th);
            Some(out)
        }
        _ => None,
    };
    Ok((sols, proofs))
}

/// Solutions `F₁, …, Fₘ` of the system `pᵢ ↔ systemᵢ`.
pub fn simultaneous_fixed_points(system: &[Formula], vars: &[String], n: LogicIndex) -> Result<Vec<Formula>, SynthError> {
    validate_system(system, vars)?;
    Ok(solve_system(system, vars, n, Strategy::General, None)?.0)
}

/// As [`simultaneous_fixed_points`], with a checked certificate of
/// `Fᵢ ↔ systemᵢ(F₁, …, Fₘ)` for each equation.
pub fn simultaneous_fixed_points_certified(
    system: &[Formula],
    vars: &[String],
    n: LogicIndex,
) -> Result<(Vec<Formula>, Vec<Certificate>), SynthError> {
    validate_system(system, vars)?;
    let mut prover = Prover::new(n);
    let (sols, thms) = solve_system(system, vars, n, Strategy::General, Some(&mut prover))?;
    let certs = thms
        .expect("prover supplied")
        .into_iter()
        .map(|t| checked(&prover, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((sols, certs))
}

/// A fixed point of `a` in `p` by the general construction.
pub fn fixed_point(a: &Formula, p: &str, n: LogicIndex, want_cert: bool) -> Result<FixedPointResult, SynthError> {
    fixed_point_with(a, p, n, Strategy::General, want_cert)
}

pub fn fixed_point_with(
    a: &Formula,
    p: &str,
    n: LogicIndex,
    strategy: Strategy,
    want_cert: bool,
) -> Result<FixedPointResult, SynthError> {
    if !is_modalized(a, p) {
        return Err(SynthError::NotModalized(p.to_string()));
    }
    let mut prover = want_cert.then(|| Prover::new(n));
    let (fixed_point, trace, method, thm) = if a.as_box().is_some() {
        solve_boxed(a, p, n, strategy, prover.as_mut())?
    } else {
        reduce(a, p, n, strategy, prover.as_mut())?
    };
    let allowed: BTreeSet<String> = atoms(a).into_iter().filter(|v| v != p).collect();
    if let Some(bad) = atoms(&fixed_point).into_iter().find(|v| !allowed.contains(v)) {
        return Err(SynthError::Hygiene(format!("{bad} occurs in {}", print(&fixed_point, true))));
    }
    let certificate = match (prover, thm) {
        (Some(pr), Some(t)) => {
            let cert = checked(&pr, t)?;
            let want = Formula::iff(fixed_point.clone(), substitute(a, p, &fixed_point));
            if cert.goal != want {
                return Err(SynthError::Derive(DeriveError::Shape("certificate goal is not F ↔ A(F)".into())));
            }
            Some(cert)
        }
        _ => None,
    };
    Ok(FixedPointResult {
        fixed_point,
        trace,
        certificate,
        method,
        strategy,
    })
}

fn reduce(
    a: &Formula,
    p: &str,
    n: LogicIndex,
    strategy: Strategy,
    mut prover: Option<&mut Prover>,
) -> Result<(Formula, SynthTrace, Method, Option<Thm>), SynthError> {
    let d = decompose(a, p)?;
    let mut trace = SynthTrace::new(a.clone(), n);
    trace.push("A", a.clone());
    trace.push("skeleton", d.skeleton.clone());
    if d.parts.is_empty() {
        trace.push("fixpoint", a.clone());
        let t = match prover {
            Some(pr) => Some(pr.taut(Formula::iff(a.clone(), a.clone()))?),
            None => None,
        };
        return Ok((a.clone(), trace, Method::Reduction, t));
    }
    let system: Vec<Formula> = d.parts.iter().map(|c| substitute(c, p, &d.skeleton)).collect();
    for (i, s) in system.iter().enumerate() {
        trace.push(format!("S{}", i + 1), s.clone());
    }
    let (sols, thms) = solve_system(&system, &d.vars, n, strategy, prover.as_deref_mut())?;
    for (i, g) in sols.iter().enumerate() {
        trace.push(format!("G{}", i + 1), g.clone());
    }
    let map: HashMap<String, Formula> = d.vars.iter().cloned().zip(sols.iter().cloned()).collect();
    let f = substitute_all(&d.skeleton, &map);
    trace.push("fixpoint", f.clone());
    let thm = match (prover, thms) {
        (Some(pr), Some(thms)) => {
            let holes: Vec<Hole> = d
                .vars
                .iter()
                .zip(&sols)
                .zip(&d.parts)
                .map(|((v, g), c)| Hole::new(v.clone(), g.clone(), substitute(c, p, &f)))
                .collect();
            Some(pr.replace_equiv(&d.skeleton, &holes, &thms)?)
        }
        _ => None,
    };
    Ok((f, trace, Method::Reduction, thm))
}

/// Re-runs the construction that produced `result` and certifies
/// `F ↔ A(F)`.
pub fn derive_fixed_point_cert(
    a: &Formula,
    p: &str,
    result: &FixedPointResult,
    n: LogicIndex,
) -> Result<Certificate, SynthError> {
    if result.trace.n != n {
        return Err(SynthError::Derive(DeriveError::LogicMismatch {
            expected: n.get(),
            found: result.trace.n.get(),
        }));
    }
    if result.trace.stages.first().map(|(_, f)| f) != Some(a) {
        return Err(SynthError::Derive(DeriveError::Trace("first stage is not the input".into())));
    }
    let rerun = fixed_point_with(a, p, n, result.strategy, true)?;
    if rerun.fixed_point != result.fixed_point || rerun.trace != result.trace {
        return Err(SynthError::Derive(DeriveError::Trace(
            "trace does not match the construction of the input".into(),
        )));
    }
    Ok(rerun.certificate.expect("certificate requested"))
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
    fn decompose_examples() {
        let d = decompose(&f("~box p"), "p").unwrap();
        assert_eq!(d.skeleton, Formula::not(Formula::var("_fp0")));
        assert_eq!(d.parts, vec![f("box p")]);
        let d = decompose(&f("box p -> box ~p"), "p").unwrap();
        assert_eq!(d.skeleton, Formula::implies(Formula::var("_fp0"), Formula::var("_fp1")));
        assert_eq!(d.parts, vec![f("box p"), f("box ~p")]);
        let d = decompose(&f("q"), "p").unwrap();
        assert_eq!(d.skeleton, f("q"));
        assert!(d.parts.is_empty());
        let d = decompose(&f("box p & (q | box p)"), "p").unwrap();
        assert_eq!(d.parts.len(), 1);
        assert!(matches!(decompose(&f("p & box p"), "p"), Err(SynthError::NotModalized(_))));
    }

    #[test]
    fn gl_baseline() {
        let a = f("~box p");
        let r = fixed_point(&a, "p", n(1), true).unwrap();
        assert_eq!(crate::simplify::simplify(&r.fixed_point), f("~box false"));
        assert!(r.certificate.is_some());
    }

    #[test]
    fn two_equation_system() {
        let sys = [f("box p2"), f("box ~p1")];
        let vars = ["p1".to_string(), "p2".to_string()];
        let (sols, certs) = simultaneous_fixed_points_certified(&sys, &vars, n(2)).unwrap();
        assert_eq!(sols.len(), 2);
        let map: HashMap<String, Formula> = vars.iter().cloned().zip(sols.iter().cloned()).collect();
        for i in 0..2 {
            assert_eq!(certs[i].goal, Formula::iff(sols[i].clone(), substitute_all(&sys[i], &map)));
        }
        assert_eq!(simultaneous_fixed_points(&sys, &vars, n(2)).unwrap(), sols);
    }

    #[test]
    fn system_errors() {
        let v = ["p".to_string()];
        assert!(matches!(simultaneous_fixed_points(&[f("p")], &v, n(2)), Err(SynthError::NotBoxed(_))));
        assert!(matches!(simultaneous_fixed_points(&[], &[], n(2)), Err(SynthError::Arity { .. })));
        let vv = ["p".to_string(), "p".to_string()];
        assert!(matches!(
            simultaneous_fixed_points(&[f("box p"), f("box p")], &vv, n(2)),
            Err(SynthError::DuplicateVar(_))
        ));
    }

    #[test]
    fn mixed_formula_with_parameters() {
        let a = f("box (p -> q) & ~box box (r | p)");
        for k in 1..=3 {
            let r = fixed_point(&a, "p", n(k), true).unwrap();
            assert!(!atoms(&r.fixed_point).contains("p"));
            assert_eq!(r.method, Method::Reduction);
            let c = derive_fixed_point_cert(&a, "p", &r, n(k)).unwrap();
            assert_eq!(Some(c), r.certificate);
        }
    }
}
