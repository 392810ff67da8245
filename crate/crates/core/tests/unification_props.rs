mod common;

use common::{apart, fs, join, same};
use lexlab::avm::{canonicalize, parse_structure, subsumes, unify, UnifyFailure};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

    #[test]
    fn depth_is_bounded(a in fs()) {
        prop_assert!(a.depth() <= 4);
    }

    #[test]
    fn print_parse_round_trip(a in fs(), b in fs()) {
        prop_assert_eq!(parse_structure(&a.to_string()).unwrap(), a.clone());
        if let Some(u) = join(&a, &b) {
            prop_assert_eq!(parse_structure(&u.to_string()).unwrap(), u);
        }
    }

    #[test]
    fn idempotence(a in fs()) {
        let u = join(&a, &a).expect("a structure unifies with itself");
        prop_assert!(same(&u, &a), "{} vs {}", u, a);
    }

    #[test]
    fn commutativity(a in fs(), b in fs()) {
        match (unify(&a, &b), unify(&b, &a)) {
            (Ok(x), Ok(y)) => prop_assert!(same(&x.structure, &y.structure), "{} vs {}", x.structure, y.structure),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "only one order unified: {:?} / {:?}", x.is_ok(), y.is_ok()),
        }
    }

    #[test]
    fn associativity_on_success(a in fs(), b in fs(), c in fs()) {
        let (a, b, c) = (apart(&a, "1"), apart(&b, "2"), apart(&c, "3"));
        let left = join(&a, &b).and_then(|ab| join(&ab, &c));
        let right = join(&b, &c).and_then(|bc| join(&a, &bc));
        match (left, right) {
            (Some(l), Some(r)) => prop_assert!(same(&l, &r), "{} vs {}", l, r),
            (None, None) => {}
            (l, r) => prop_assert!(false, "grouping changed success: {:?} / {:?}", l.is_some(), r.is_some()),
        }
    }

    #[test]
    fn result_is_subsumed_by_inputs(a in fs(), b in fs()) {
        let b = apart(&b, "2");
        if let Some(u) = join(&a, &b) {
            prop_assert!(subsumes(&a, &u), "{} should subsume {}", a, u);
            prop_assert!(subsumes(&b, &u), "{} should subsume {}", b, u);
        }
    }

    #[test]
    fn monotonicity_under_subsumption(g in fs(), d in fs(), c in fs()) {
        let d = apart(&d, "2");
        let c = apart(&c, "3");
        let Some(s) = join(&g, &d) else { return Ok(()); };
        prop_assert!(subsumes(&g, &s));
        if let Some(sc) = join(&s, &c) {
            let gc = join(&g, &c);
            prop_assert!(gc.is_some(), "general side failed where specific side succeeded");
            let gc = gc.unwrap();
            prop_assert!(subsumes(&gc, &sc), "{} should subsume {}", gc, sc);
        }
    }

    #[test]
    fn conflicts_name_a_real_path(a in fs(), b in fs()) {
        let b = apart(&b, "2");
        if let Err(UnifyFailure::Conflict { path }) = unify(&a, &b) {
            prop_assert!(!path.is_empty());
            let first = path.split('|').next().unwrap();
            prop_assert!(a.get(first).is_some() || b.get(first).is_some());
        }
    }

    #[test]
    fn canonical_form_ignores_variable_names(a in fs()) {
        prop_assert_eq!(canonicalize(&apart(&a, "renamed")), canonicalize(&a));
    }
}

#[test]
fn category_clash_fails_at_cat() {
    let det = parse_structure("[CAT:det]").unwrap();
    let n = parse_structure("[CAT:n]").unwrap();
    let err = unify(&det, &n).unwrap_err();
    assert_eq!(err, UnifyFailure::Conflict { path: "CAT".into() });
    assert_eq!(err.path(), "CAT");
}

#[test]
fn generator_hits_both_outcomes() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;

    let mut runner = TestRunner::deterministic();
    let (mut ok, mut nested) = (0, 0);
    let n = 2_000;
    for _ in 0..n {
        let a = fs().new_tree(&mut runner).unwrap().current();
        let b = fs().new_tree(&mut runner).unwrap().current();
        ok += unify(&a, &b).is_ok() as usize;
        nested += (a.depth() >= 3) as usize;
    }
    assert!(ok * 5 > n, "too few successes: {ok}/{n}");
    assert!(ok * 10 < n * 9, "too few conflicts: {ok}/{n}");
    assert!(nested * 10 > n, "too few deep structures: {nested}/{n}");
}
