mod common;

use common::n;
use modal_fixpoint::kripke::countermodel;
use modal_fixpoint::proof::{
    check, check_in, derive_equiv_box, derive_lob, derive_regularity, derive_subst, derive_trans,
    Certificate, CheckFailure, Hole, Justification, ProofLine, Prover, SubstKind,
};
use modal_fixpoint::random::random_formula;
use modal_fixpoint::{box_power, boxdot, dep, dep_mod, simplify, Formula, LogicIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small(rng: &mut ChaCha8Rng) -> Formula {
    let size = rng.gen_range(1..=6);
    random_formula(rng, &["q", "r"], size)
}

fn context(rng: &mut ChaCha8Rng, accept: impl Fn(&Formula) -> bool) -> Formula {
    loop {
        let size = rng.gen_range(2..=9);
        let c = random_formula(rng, &["x", "q"], size);
        if accept(&c) {
            return c;
        }
    }
}

fn taut(logic: LogicIndex, goal: Formula) -> Certificate {
    Certificate {
        logic,
        lines: vec![ProofLine {
            formula: goal.clone(),
            justification: Justification::Taut,
        }],
        goal,
    }
}

/// Fifty instances of every derived rule at each n, with `visit` called on
/// each emitted certificate.
fn regression(mut visit: impl FnMut(&str, &Certificate)) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3);
    for k in 1..=3 {
        let logic = n(k);
        for _ in 0..50 {
            let a = small(&mut rng);
            visit("trans", &derive_trans(&a, logic).unwrap());

            let holes = [Hole::new("x", small(&mut rng), small(&mut rng))];
            let ctx = context(&mut rng, |c| !dep(c, "x").is_empty());
            visit("plus", &derive_subst(SubstKind::Plus, &ctx, &holes, logic).unwrap());
            visit("box", &derive_subst(SubstKind::Boxed, &ctx, &holes, logic).unwrap());
            if k > 1 {
                let ctx = context(&mut rng, |c| {
                    let r = dep_mod(c, "x", logic);
                    r.len() == 1 && !r.contains(&0)
                });
                visit("residue", &derive_subst(SubstKind::Residue, &ctx, &holes, logic).unwrap());
            }
            let ctx = context(&mut rng, |c| dep_mod(c, "x", logic) == [0].into() && !dep(c, "x").contains(&0));
            visit("modalized", &derive_subst(SubstKind::Modalized, &ctx, &holes, logic).unwrap());

            let (x, y) = (small(&mut rng), small(&mut rng));
            let a = Formula::implies(x.clone(), Formula::or(y, x));
            let prem = taut(logic, Formula::implies(boxdot(k, &a, false).unwrap(), a.clone()));
            visit("lob", &derive_lob(&prem, &a, logic).unwrap());

            let a = small(&mut rng);
            let b = simplify(&a);
            let mut pr = Prover::new(logic);
            let sa = pr.simplify_equiv(&a).unwrap();
            let goal = Formula::implies(box_power(k, &a), Formula::iff(a.clone(), b.clone()));
            let t = pr.chain(&[sa], goal).unwrap();
            visit("equiv_box", &derive_equiv_box(&pr.certificate(t), &a, &b, logic).unwrap());
        }
    }
}

#[test]
fn derived_rules_check_and_have_no_countermodel() {
    let mut count = 0;
    regression(|rule, c| {
        check(c).unwrap_or_else(|e| panic!("{rule}: {e}"));
        let cm = countermodel(&c.goal, c.logic, 3).unwrap();
        assert!(cm.is_none(), "{rule}: kernel-accepted goal refuted by {cm:?}");
        count += 1;
    });
    assert_eq!(count, 50 * (6 + 7 + 7));
}

#[test]
fn regularity_k_fold() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4);
    for _ in 0..25 {
        let (x, y) = (small(&mut rng), small(&mut rng));
        let imp = Formula::implies(Formula::and(x.clone(), y), x.clone());
        let prem = taut(n(1), imp.clone());
        for k in 1..=4 {
            let c = derive_regularity(&prem, k).unwrap();
            check(&c).unwrap();
            let (lhs, rhs) = imp.as_implies().unwrap();
            assert_eq!(c.goal, Formula::implies(box_power(k, lhs), box_power(k, rhs)));
        }
    }
}

#[test]
fn serialisation_is_deterministic_and_round_trips() {
    let mut first = vec![];
    regression(|_, c| first.push(c.to_json()));
    let mut i = 0;
    regression(|_, c| {
        let s = c.to_json();
        assert_eq!(s, first[i]);
        assert_eq!(&Certificate::from_json(&s).unwrap(), c);
        i += 1;
    });
}

#[test]
fn tampering_is_caught() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5);
    let base = derive_subst(
        SubstKind::Plus,
        &Formula::boxed(Formula::var("x")),
        &[Hole::new("x", Formula::var("q"), Formula::var("r"))],
        n(2),
    )
    .unwrap();
    for _ in 0..50 {
        let mut c = base.clone();
        let i = rng.gen_range(0..c.lines.len());
        c.lines[i].formula = Formula::boxed(c.lines[i].formula.clone());
        let err = check(&c).unwrap_err();
        assert!(err.line.is_some() || err.reason == CheckFailure::GoalMismatch, "{err}");
    }
    let err = check_in(&base, n(3)).unwrap_err();
    assert!(matches!(err.reason, CheckFailure::WrongLogic { expected: 3, found: 2 }));
}
