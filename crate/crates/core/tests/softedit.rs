mod common;

use std::cell::RefCell;
use std::collections::HashMap;

use common::{random_nfa, rng};
use opencons::automata::Nfa;
use opencons::fixtures;
use opencons::oracle::{edit_distance_bruteforce, nondecreasing_bruteforce, words_up_to};
use opencons::softedit::{
    approx_measures, approximation_weights, contractibility_status, m_star_bounded, open_edit_measure,
    properness_status, Contractibility, EditOp, EditScript, EditWeights, Guarantee, MStarStatus, OpenEditMeasure,
    ProperCase, Properness,
};
use opencons::symbol::word;
use opencons::{Cost, Symbol};
use proptest::prelude::*;
use rand::Rng;

const ABC_WORD: &str = "bbbabcabcabcca";

fn abc_measure() -> OpenEditMeasure {
    OpenEditMeasure::new(fixtures::abc_star(), EditWeights::ints(4, 4, 4, 1))
}

/// Membership in the prefix closure straight from the definition: some
/// extension of at most `|states|` letters is accepted.
fn in_closure(nfa: &Nfa, w: &[Symbol]) -> bool {
    (0..=nfa.num_states()).any(|k| {
        words_up_to(nfa.alphabet(), k)
            .into_iter()
            .filter(|u| u.len() == k)
            .any(|u| nfa.accepts(&[w, &u[..]].concat()).unwrap_or(false))
    })
}

const CAP: i64 = 8;

/// The brute-force distance, or `None` when nothing lies within `CAP`.
fn brute(nfa: &Nfa, weights: &EditWeights, w: &[Symbol]) -> Option<Cost> {
    let memo = RefCell::new(HashMap::<Vec<Symbol>, bool>::new());
    let member = |v: &[Symbol]| *memo.borrow_mut().entry(v.to_vec()).or_insert_with(|| in_closure(nfa, v));
    edit_distance_bruteforce(&member, nfa.alphabet(), weights, w, Cost::int(CAP), 400_000).ok()
}

fn agrees(m: &OpenEditMeasure, nfa: &Nfa, w: &[Symbol]) -> bool {
    let fast = m.value(w).unwrap();
    match brute(nfa, m.weights(), w) {
        Some(slow) => slow == fast,
        None => fast > Cost::int(CAP),
    }
}

fn weights_strategy() -> impl Strategy<Value = EditWeights> {
    let w = prop_oneof![4 => (1i64..5).prop_map(Cost::int), 1 => Just(Cost::Infinite)];
    (w.clone(), w.clone(), w.clone(), w).prop_map(|(a, b, c, d)| EditWeights::new(a, b, c, d))
}

#[test]
fn abc_word_values() {
    let m = abc_measure();
    let w = word(ABC_WORD);
    assert_eq!(m.value(&w).unwrap(), Cost::int(12));
    let wb = word(&format!("{ABC_WORD}b"));
    assert_eq!(m.value(&wb).unwrap(), Cost::int(10));
    let approx = approx_measures(&m, &w).unwrap();
    assert_eq!(
        [approx.m1, approx.m2, approx.m3, approx.m4, approx.m5],
        [4, 8, 4, 4, 8].map(Cost::int)
    );
    let star = m_star_bounded(&m, &w, 1).unwrap();
    assert_eq!(star.value, Cost::int(10));
    assert_eq!(star.ext, word("b"));
}

#[test]
fn abc_measure_is_not_contractible() {
    let m = abc_measure();
    assert_eq!(contractibility_status(m.weights(), false), Contractibility::NotGuaranteed);
    let verdict = nondecreasing_bruteforce(&|w: &[Symbol]| m.value(w), fixtures::abc_star().alphabet(), 6).unwrap();
    assert!(!verdict.holds());
}

#[test]
fn swap_beats_deletion_on_ab_star() {
    let m = OpenEditMeasure::new(fixtures::ab_star_or_a(), EditWeights::ints(2, 2, 2, 1));
    assert_eq!(m.value(&word("abba")).unwrap(), Cost::int(1));
    assert_eq!(m.value(&word("abb")).unwrap(), Cost::int(2));
    let star = m_star_bounded(&m, &word("abb"), 1).unwrap();
    assert_eq!(star.value, Cost::int(1));
    assert_eq!(star.ext, word("a"));
    assert_eq!(star.status, MStarStatus::Exact);
}

#[test]
fn members_of_the_closure_cost_nothing() {
    let m = abc_measure();
    for w in ["", "a", "abcab", "abcabca"] {
        let eval = open_edit_measure(&m, &word(w)).unwrap();
        assert_eq!(eval.cost, Cost::ZERO);
        assert!(eval.script.unwrap().ops.is_empty());
        let approx = approx_measures(&m, &word(w)).unwrap();
        assert!([approx.m1, approx.m2, approx.m3, approx.m4, approx.m5].iter().all(Cost::is_zero));
        let star = m_star_bounded(&m, &word(w), 2).unwrap();
        assert_eq!((star.value, star.status), (Cost::ZERO, MStarStatus::Exact));
    }
}

#[test]
fn letters_outside_the_language_must_be_edited_away() {
    let m = abc_measure().with_static_type(["a", "b", "c", "d"].map(Symbol::new));
    assert_eq!(m.value(&word("d")).unwrap(), Cost::int(4));
    assert_eq!(m.value(&word("adc")).unwrap(), Cost::int(4));
    let strict = abc_measure().with_static_type(["a", "b", "c"].map(Symbol::new));
    assert!(strict.value(&word("d")).is_err());
}

#[test]
fn contractibility_examples() {
    let ok = |w: EditWeights| contractibility_status(&w, false);
    assert_eq!(ok(EditWeights::ints(1, 1, 1, 1)), Contractibility::Guaranteed(Guarantee::CheapNonTransposition));
    assert_eq!(ok(EditWeights::ints(4, 4, 4, 1)), Contractibility::NotGuaranteed);
    assert_eq!(ok(EditWeights::ints(4, 4, 4, 0)), Contractibility::Guaranteed(Guarantee::ZeroWeight));
    assert_eq!(
        contractibility_status(&EditWeights::ints(4, 4, 4, 1), true),
        Contractibility::Guaranteed(Guarantee::OrderFree)
    );
}

#[test]
fn properness_examples() {
    let ambient = {
        let all = Nfa::build(&["a", "b", "c"], &["s"], &["s"], &["s"], &[("s", "a", "s"), ("s", "b", "s"), ("s", "c", "s")]);
        all.unwrap()
    };
    let m = abc_measure();
    assert_eq!(ProperCase::of(m.weights()), ProperCase::AllPositive);
    assert_eq!(properness_status(&m, &ambient, 6).unwrap(), Properness::Proper);
    let free_delete = m.reweighted(EditWeights::ints(4, 4, 0, 1));
    match properness_status(&free_delete, &ambient, 6).unwrap() {
        Properness::Improper { witness } => {
            assert!(!in_closure(&fixtures::abc_star(), &witness));
            assert_eq!(free_delete.value(&witness).unwrap(), Cost::ZERO);
        }
        other => panic!("expected a witness, got {other:?}"),
    }
    let free_sub = m.reweighted(EditWeights::ints(0, 4, 4, 1));
    assert!(matches!(properness_status(&free_sub, &ambient, 6).unwrap(), Properness::Improper { .. }));
    // the ambient language itself is prefix-closed (abc)*, so free deletions change nothing there
    let within = fixtures::abc_star().prefix_closure();
    assert_eq!(properness_status(&free_delete, &within, 6).unwrap(), Properness::Indeterminate { checked_up_to: 6 });
}

#[test]
fn script_normal_form_examples() {
    let w = EditWeights::ints(2, 2, 2, 1);
    let source = word("abc");
    let script = EditScript {
        source: source.clone(),
        ops: vec![EditOp::Insert { pos: 4, symbol: Symbol::new("a") }, EditOp::Delete { pos: 1 }],
    };
    let normal = script.normalize(&w).unwrap();
    assert!(normal.is_normal_form());
    assert!(matches!(normal.ops[0], EditOp::Delete { .. }));
    assert_eq!(normal.apply().unwrap(), script.apply().unwrap());
    assert_eq!(normal.cost(&w), script.cost(&w));

    let twice = EditScript {
        source: source.clone(),
        ops: vec![
            EditOp::Substitute { pos: 2, symbol: Symbol::new("c") },
            EditOp::Substitute { pos: 2, symbol: Symbol::new("a") },
        ],
    };
    let once = twice.normalize(&w).unwrap();
    assert_eq!(once.apply().unwrap(), word("aac"));
    assert!(once.cost(&w) < twice.cost(&w));

    let cheap = EditWeights::ints(5, 1, 1, 1);
    let chained = EditScript {
        source: word("abcd"),
        ops: vec![EditOp::Transpose { pos: 1 }, EditOp::Transpose { pos: 2 }, EditOp::Transpose { pos: 3 }],
    };
    let moved = chained.normalize(&cheap).unwrap();
    assert_eq!(moved.apply().unwrap(), word("bcda"));
    assert!(moved.cost(&cheap) <= chained.cost(&cheap));
    assert!(!moved.ops.iter().any(|op| matches!(op, EditOp::Transpose { .. })));
}

#[test]
fn fixture_measures_match_the_brute_force_search() {
    for (name, nfa) in fixtures::automata() {
        for weights in [EditWeights::ints(1, 1, 1, 1), EditWeights::ints(4, 4, 4, 1), EditWeights::ints(2, 3, 1, 5)] {
            let m = OpenEditMeasure::new(nfa.clone(), weights);
            for w in words_up_to(nfa.alphabet(), 4) {
                assert!(agrees(&m, &nfa, &w), "{name} {w:?}");
            }
        }
    }
}

#[test]
fn approximations_are_contractible_on_fixtures() {
    for (name, nfa) in fixtures::automata() {
        let m = OpenEditMeasure::new(nfa.clone(), EditWeights::ints(4, 3, 5, 1));
        for (i, weights) in approximation_weights(m.weights()).into_iter().take(3).enumerate() {
            let mi = m.reweighted(weights);
            let verdict = nondecreasing_bruteforce(&|w: &[Symbol]| mi.value(w), nfa.alphabet(), 5).unwrap();
            assert!(verdict.holds(), "{name}: m{} {verdict:?}", i + 1);
        }
    }
}

/// A free transposition does not make the measure contractible: the target
/// is the prefix closure, which is not closed under permutations. On `(abc)*`
/// the word `b` costs a full edit while `ba` is one free swap from `ab`.
#[test]
fn free_transpositions_do_not_give_contractibility() {
    let m = abc_measure();
    let m4 = m.reweighted(approximation_weights(m.weights())[3]);
    assert_eq!(m4.value(&word("b")).unwrap(), Cost::int(4));
    assert_eq!(m4.value(&word("ba")).unwrap(), Cost::ZERO);
    let m5 = |w: &str| approx_measures(&m, &word(w)).unwrap().m5;
    assert_eq!(m5("b"), Cost::int(4));
    assert!(m5("ba") < m5("b"));
    // so the pointwise maximum also exceeds the tightest contractible approximation
    let star = m_star_bounded(&m, &word("b"), 1).unwrap();
    assert_eq!((star.value, star.status), (Cost::ONE, MStarStatus::Exact));
    assert!(m5("b") > star.value);
}

#[test]
fn approximation_chain_on_fixtures() {
    for (name, nfa) in fixtures::automata() {
        let m = OpenEditMeasure::new(nfa.clone(), EditWeights::ints(4, 4, 4, 1));
        for w in words_up_to(nfa.alphabet(), 5) {
            let full = m.value(&w).unwrap();
            let a = approx_measures(&m, &w).unwrap();
            for mi in [a.m1, a.m2, a.m3, a.m4] {
                assert!(mi <= a.m5);
            }
            assert!(a.m5 <= full);
            let star = m_star_bounded(&m, &w, 2).unwrap();
            assert!(star.value <= full, "{name} {w:?}");
            // the first three approximations are contractible, so m* dominates them
            assert!([a.m1, a.m2, a.m3].iter().all(|mi| *mi <= star.value), "{name} {w:?}");
        }
    }
}

#[test]
fn infimum_over_extensions_is_reached_by_short_extensions() {
    let m = abc_measure();
    for w in words_up_to(fixtures::abc_star().alphabet(), 5) {
        let (inf, ext) = m.infimum_over_extensions(&w).unwrap();
        let mut extended = w.clone();
        extended.extend(ext);
        assert_eq!(m.value(&extended).unwrap(), inf);
        let bounded = (0..=3)
            .flat_map(|k| words_up_to(fixtures::abc_star().alphabet(), k))
            .map(|u| m.value(&[&w[..], &u[..]].concat()).unwrap())
            .min()
            .unwrap();
        assert!(inf <= bounded);
    }
}

#[test]
fn cheap_transpositions_on_seeded_languages() {
    let mut r = rng(3);
    let mut checked = 0;
    while checked < 25 {
        let nfa = random_nfa(&mut r, 4, 2);
        let mut ws: Vec<i64> = (0..4).map(|_| r.gen_range(1..6)).collect();
        if ws[..3].iter().min().unwrap() > &ws[3] {
            ws[3] = *ws[..3].iter().min().unwrap();
        }
        let weights = EditWeights::ints(ws[0], ws[1], ws[2], ws[3]);
        assert!(matches!(contractibility_status(&weights, false), Contractibility::Guaranteed(_)));
        let m = OpenEditMeasure::new(nfa.clone(), weights);
        let verdict = nondecreasing_bruteforce(&|w: &[Symbol]| m.value(w), nfa.alphabet(), 5).unwrap();
        assert!(verdict.holds(), "{ws:?}: {verdict:?}");
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn measures_match_brute_force_on_random_languages(seed in any::<u64>(), weights in weights_strategy()) {
        let nfa = random_nfa(&mut rng(seed), 4, 2);
        let m = OpenEditMeasure::new(nfa.clone(), weights);
        for w in words_up_to(nfa.alphabet(), 3) {
            prop_assert!(agrees(&m, &nfa, &w), "{:?}", w);
        }
    }

    #[test]
    fn scripts_replay_into_the_closure_at_their_cost(seed in any::<u64>(), weights in weights_strategy()) {
        let nfa = random_nfa(&mut rng(seed), 4, 2);
        let m = OpenEditMeasure::new(nfa.clone(), weights);
        for w in words_up_to(nfa.alphabet(), 4) {
            let eval = open_edit_measure(&m, &w).unwrap();
            match eval.script {
                Some(script) => {
                    prop_assert_eq!(&script.source, &w);
                    let target = script.apply().unwrap();
                    prop_assert!(in_closure(&nfa, &target));
                    prop_assert_eq!(script.cost(&weights), eval.cost);
                    let normal = script.normalize(&weights).unwrap();
                    prop_assert!(normal.is_normal_form());
                    prop_assert_eq!(normal.apply().unwrap(), target);
                    prop_assert!(normal.cost(&weights) <= eval.cost);
                }
                None => prop_assert!(eval.cost.is_infinite()),
            }
        }
    }

    #[test]
    fn smaller_weights_give_smaller_measures(
        seed in any::<u64>(),
        big in proptest::array::uniform4(1i64..6),
        cut in proptest::array::uniform4(0i64..3),
    ) {
        let nfa = random_nfa(&mut rng(seed), 4, 2);
        let small: Vec<i64> = big.iter().zip(cut).map(|(b, c)| (b - c).max(0)).collect();
        let heavy = OpenEditMeasure::new(nfa.clone(), EditWeights::ints(big[0], big[1], big[2], big[3]));
        let light = heavy.reweighted(EditWeights::ints(small[0], small[1], small[2], small[3]));
        for w in words_up_to(nfa.alphabet(), 5) {
            prop_assert!(light.value(&w).unwrap() <= heavy.value(&w).unwrap());
        }
    }

    #[test]
    fn larger_languages_give_smaller_measures(seed in any::<u64>(), weights in weights_strategy()) {
        let nfa = random_nfa(&mut rng(seed), 4, 2);
        let all: Vec<usize> = (0..nfa.num_states()).collect();
        let finals: Vec<usize> = all.iter().copied().filter(|&q| nfa.is_final(q)).collect();
        let bigger = nfa.with_finals(&all);
        let smaller = nfa.with_finals(&finals);
        let m_small = OpenEditMeasure::new(smaller, weights);
        let m_big = OpenEditMeasure::new(bigger, weights);
        for w in words_up_to(nfa.alphabet(), 5) {
            prop_assert!(m_big.value(&w).unwrap() <= m_small.value(&w).unwrap());
        }
    }

    #[test]
    fn cheap_edits_make_measures_non_decreasing(seed in any::<u64>(), ws in proptest::array::uniform4(1i64..6)) {
        let nfa = random_nfa(&mut rng(seed), 4, 2);
        let delta = ws[3].max(*ws[..3].iter().min().unwrap());
        let m = OpenEditMeasure::new(nfa.clone(), EditWeights::ints(ws[0], ws[1], ws[2], delta));
        let verdict = nondecreasing_bruteforce(&|w: &[Symbol]| m.value(w), nfa.alphabet(), 5).unwrap();
        prop_assert!(verdict.holds());
    }

    #[test]
    fn approximations_bound_the_measure(seed in any::<u64>(), ws in proptest::array::uniform4(2i64..6), delta in 1i64..5) {
        let nfa = random_nfa(&mut rng(seed), 4, 2);
        // the approximations are meant for transpositions cheaper than every other edit
        let delta = delta.min(ws[..3].iter().min().unwrap() - 1);
        let m = OpenEditMeasure::new(nfa.clone(), EditWeights::ints(ws[0], ws[1], ws[2], delta));
        for w in words_up_to(nfa.alphabet(), 4) {
            let full = m.value(&w).unwrap();
            let a = approx_measures(&m, &w).unwrap();
            prop_assert!([a.m1, a.m2, a.m3, a.m4, a.m5].iter().all(|mi| *mi <= full));
            let star = m_star_bounded(&m, &w, 2).unwrap();
            prop_assert!([a.m1, a.m2, a.m3].iter().all(|mi| *mi <= star.value));
            prop_assert!(star.value <= full);
        }
    }
}

