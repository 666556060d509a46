use proptest::prelude::*;
use tempograd::ltl::{
    eval_lasso, is_nnf, nnf, parse_ltl, parse_with_aps, AtomicProp, Formula, LassoTrace, Ltl,
};

fn aps() -> Vec<AtomicProp> {
    ["a>0", "b>0", "c>0"]
        .iter()
        .map(|t| AtomicProp::parse(t).unwrap())
        .collect()
}

/// Surface-syntax formulas; release is internal and never printed as such.
fn ltl() -> impl Strategy<Value = Ltl> {
    ltl_with(false)
}

fn ltl_with(release: bool) -> impl Strategy<Value = Ltl> {
    let leaf = prop_oneof![
        Just(Ltl::True),
        Just(Ltl::False),
        (0usize..3).prop_map(Ltl::Ap),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Ltl::not),
            inner.clone().prop_map(Ltl::next),
            inner.clone().prop_map(Ltl::eventually),
            inner.clone().prop_map(Ltl::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::until(a, b)),
            (inner.clone(), inner).prop_map(move |(a, b)| if release {
                Ltl::release(a, b)
            } else {
                Ltl::until(b, a)
            }),
        ]
    })
}

fn lasso() -> impl Strategy<Value = LassoTrace> {
    (
        prop::collection::vec(0u32..8, 0..4),
        prop::collection::vec(0u32..8, 1..4),
    )
        .prop_map(|(p, c)| LassoTrace::new(p, c))
}

proptest! {
    #[test]
    fn print_parse_round_trip(root in ltl()) {
        let f = Formula { aps: aps(), root };
        let text = f.to_string();
        let back = parse_with_aps(&text, aps()).unwrap();
        prop_assert_eq!(back.root, f.root, "{}", text);
    }

    #[test]
    fn nnf_preserves_semantics(root in ltl_with(true), t in lasso()) {
        let n = nnf(&root, false);
        prop_assert!(is_nnf(&n));
        prop_assert_eq!(eval_lasso(&root, &t).unwrap(), eval_lasso(&n, &t).unwrap());
    }

    #[test]
    fn negation_flips_verdict(root in ltl_with(true), t in lasso()) {
        let neg = Ltl::not(root.clone());
        prop_assert_ne!(eval_lasso(&root, &t).unwrap(), eval_lasso(&neg, &t).unwrap());
    }

    #[test]
    fn verdict_ignores_lasso_representation(root in ltl_with(true), t in lasso(), k in 0usize..4) {
        let r = t.rotated(k);
        prop_assert_eq!(eval_lasso(&root, &t).unwrap(), eval_lasso(&root, &r).unwrap());
        let mut doubled = t.clone();
        doubled.cycle = t.cycle.iter().chain(&t.cycle).copied().collect();
        prop_assert_eq!(eval_lasso(&root, &t).unwrap(), eval_lasso(&root, &doubled).unwrap());
    }
}

proptest! {
    #[test]
    fn release_printing_keeps_semantics(root in ltl_with(true), t in lasso()) {
        let f = Formula { aps: aps(), root };
        let back = parse_with_aps(&f.to_string(), aps()).unwrap();
        prop_assert_eq!(eval_lasso(&f.root, &t).unwrap(), eval_lasso(&back.root, &t).unwrap());
    }
}

#[test]
fn negated_until_is_release() {
    let a = Ltl::Ap(0);
    let b = Ltl::Ap(1);
    let neg = Ltl::not(Ltl::until(a.clone(), b.clone()));
    let rel = Ltl::release(Ltl::not(a), Ltl::not(b));
    assert_eq!(nnf(&neg, false), rel);
    for p in 0..4u32 {
        for c in 0..4u32 {
            let t = LassoTrace::new(vec![p], vec![c, p]);
            assert_eq!(eval_lasso(&neg, &t), eval_lasso(&rel, &t));
        }
    }
    assert!(parse_ltl(r#""a>0" R "b>0""#).is_err());
}
