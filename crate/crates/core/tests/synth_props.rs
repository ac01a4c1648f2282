mod common;

use std::collections::BTreeSet;

use common::n;
use modal_fixpoint::kripke::countermodel;
use modal_fixpoint::proof::check_in;
use modal_fixpoint::random::random_modalized;
use modal_fixpoint::synth::{
    derive_fixed_point_cert, fixed_point_with, loop_stage_residues, simple_fixed_point,
    simultaneous_fixed_points_certified, Strategy as Synth, SynthTrace,
};
use modal_fixpoint::verify::{verify_fixpoint, CertVerdict, VerifyMethod};
use modal_fixpoint::{atoms, parse, substitute, Formula};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn modalized() -> impl proptest::strategy::Strategy<Value = Formula> {
    any::<u64>().prop_map(|seed| random_modalized(&mut ChaCha8Rng::seed_from_u64(seed), "p", &["q", "r"], 12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn master_soundness(a in modalized(), k in 2usize..=3) {
        let r = fixed_point_with(&a, "p", n(k), Synth::General, true).unwrap();
        let f = &r.fixed_point;
        let allowed: BTreeSet<String> = atoms(&a).into_iter().filter(|v| v != "p").collect();
        prop_assert!(atoms(f).is_subset(&allowed));
        let goal = Formula::iff(f.clone(), substitute(&a, "p", f));
        let cert = r.certificate.as_ref().unwrap();
        prop_assert_eq!(&cert.goal, &goal);
        check_in(cert, n(k)).unwrap();
        prop_assert!(countermodel(&goal, n(k), 4).unwrap().is_none());
    }

    #[test]
    fn shortcut_agrees_with_loop(a in modalized(), k in 2usize..=3) {
        let boxed = Formula::boxed(a);
        if let Some(g) = simple_fixed_point(&boxed, "p", n(k)).unwrap() {
            let f = fixed_point_with(&boxed, "p", n(k), Synth::General, false).unwrap().fixed_point;
            prop_assert!(countermodel(&Formula::iff(f, g), n(k), 4).unwrap().is_none());
        }
    }

    #[test]
    fn loop_invariant(a in modalized(), k in 1usize..=4) {
        let stages = loop_stage_residues(&Formula::boxed(a), "p", n(k)).unwrap();
        prop_assert_eq!(stages.len(), k);
        for (stage, res) in stages.iter().enumerate() {
            prop_assert!(res.iter().all(|&x| x + stage < k), "stage {} residues {:?}", stage, res);
        }
    }

    #[test]
    fn rerun_reproduces_certificate(a in modalized(), k in 1usize..=3) {
        for strategy in [Synth::General, Synth::PreferShortcut] {
            let r = fixed_point_with(&a, "p", n(k), strategy, true).unwrap();
            let bare = fixed_point_with(&a, "p", n(k), strategy, false).unwrap();
            prop_assert_eq!(&bare.fixed_point, &r.fixed_point);
            let again = derive_fixed_point_cert(&a, "p", &bare, n(k)).unwrap();
            prop_assert_eq!(Some(again), r.certificate);
        }
    }

    #[test]
    fn trace_round_trip(a in modalized(), k in 1usize..=3) {
        let r = fixed_point_with(&a, "p", n(k), Synth::General, false).unwrap();
        prop_assert_eq!(r.trace.last(), Some(&r.fixed_point));
        let back = SynthTrace::from_json(&r.trace.to_json(), n(k)).unwrap();
        prop_assert_eq!(back, r.trace);
    }

    #[test]
    fn synthesized_fixed_point_verifies(a in modalized(), k in 2usize..=3) {
        let r = fixed_point_with(&a, "p", n(k), Synth::PreferShortcut, false).unwrap();
        let rep = verify_fixpoint(&a, &r.fixed_point, "p", n(k), VerifyMethod::Both, 3).unwrap();
        let certified = matches!(rep.cert, Some(CertVerdict::Ok { .. }));
        prop_assert!(certified);
        prop_assert!(rep.accepted());
    }
}

#[test]
fn gl_baseline() {
    let a = parse("~box p").unwrap();
    let r = fixed_point_with(&a, "p", n(1), Synth::General, true).unwrap();
    assert_eq!(modal_fixpoint::simplify(&r.fixed_point), parse("~box false").unwrap());
    check_in(r.certificate.as_ref().unwrap(), n(1)).unwrap();
}

#[test]
fn simultaneous_system() {
    let f = |s: &str| parse(s).unwrap();
    let system = [f("box (p1 -> q)"), f("box (~p0 & p1)")];
    let vars = ["p0".to_string(), "p1".to_string()];
    for k in 1..=3 {
        let (sols, certs) = simultaneous_fixed_points_certified(&system, &vars, n(k)).unwrap();
        for ((s, sol), cert) in system.iter().zip(&sols).zip(&certs) {
            let mut inst = s.clone();
            for (v, g) in vars.iter().zip(&sols) {
                inst = substitute(&inst, v, g);
            }
            assert_eq!(cert.goal, Formula::iff(sol.clone(), inst));
            check_in(cert, n(k)).unwrap();
            assert!(!atoms(sol).contains("p0") && !atoms(sol).contains("p1"));
        }
    }
}

#[test]
fn worked_example_second_fixed_point() {
    let a = parse("box box ~p").unwrap();
    let c = parse("box box dia dia true").unwrap();
    let rep = verify_fixpoint(&a, &c, "p", n(3), VerifyMethod::Both, 4).unwrap();
    assert!(matches!(rep.cert, Some(CertVerdict::Ok { .. })));
    assert!(rep.accepted());
}
