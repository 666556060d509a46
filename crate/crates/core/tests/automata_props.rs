use proptest::prelude::*;
use tempograd::automata::{
    emit_dot, emit_hoa, parse_hoa, run_lasso, translate_fragment, EpsPolicy, Ldba,
};
use tempograd::bundled;
use tempograd::ltl::{eval_lasso, LassoTrace};

fn corpus_automata() -> Vec<(tempograd::ltl::Formula, Ldba)> {
    bundled::corpus()
        .unwrap()
        .into_iter()
        .map(|f| {
            let a = translate_fragment(&f).unwrap();
            (f, a)
        })
        .collect()
}

#[test]
fn every_corpus_automaton_is_well_formed() {
    for (f, a) in corpus_automata() {
        let v = a.validate();
        assert!(v.is_empty(), "{f}: {v:?}");
    }
}

#[test]
fn hoa_round_trip_on_corpus_and_bundled() {
    for (f, a) in corpus_automata() {
        let text = emit_hoa(&a);
        let back = parse_hoa(&text).unwrap();
        assert_eq!(back, a, "{f}");
        assert_eq!(emit_hoa(&back), text);
    }
    for (name, _, hoa) in bundled::AUTOMATA {
        let a = parse_hoa(hoa).unwrap();
        assert_eq!(emit_hoa(&a), hoa, "{name}");
    }
}

#[test]
fn dot_marks_accepting_and_eps() {
    let a = bundled::automaton("parking").unwrap().unwrap();
    let dot = emit_dot(&a);
    assert!(dot.contains("doublecircle"));
    assert!(dot.contains("style=dashed"));
}

fn lasso() -> impl Strategy<Value = LassoTrace> {
    (
        prop::collection::vec(0u32..8, 0..5),
        prop::collection::vec(0u32..8, 1..4),
    )
        .prop_map(|(p, c)| LassoTrace::new(p, c))
}

proptest! {
    #[test]
    fn automaton_agrees_with_semantics(k in 0usize..25, t in lasso()) {
        let all = corpus_automata();
        let (f, a) = &all[k % all.len()];
        prop_assert_eq!(
            run_lasso(a, &t, &EpsPolicy::Search),
            eval_lasso(&f.root, &t).unwrap(),
            "{} on {:?}", f, t
        );
    }

    #[test]
    fn fixed_eps_runs_are_sound(k in 0usize..25, t in lasso(), choices in prop::collection::vec(prop::option::of(0usize..6), 0..12)) {
        let all = corpus_automata();
        let (f, a) = &all[k % all.len()];
        if run_lasso(a, &t, &EpsPolicy::Fixed(choices)) {
            prop_assert!(eval_lasso(&f.root, &t).unwrap(), "{}", f);
        }
    }
}
