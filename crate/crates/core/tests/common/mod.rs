#![allow(dead_code)]

use std::collections::BTreeSet;

use opencons::automata::Nfa;
use opencons::{Symbol, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random NFA with `1..=max_states` states over the first `1..=max_symbols`
/// letters of `abc...`. Transition density and final states are random; the
/// result may have several start states or an empty language.
pub fn random_nfa(rng: &mut ChaCha8Rng, max_states: usize, max_symbols: usize) -> Nfa {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_symbols);
    let letters: Vec<String> = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let density = rng.gen_range(0.15..0.6);
    let mut transitions = Vec::new();
    for p in &states {
        for a in &letters {
            for q in &states {
                if rng.gen_bool(density / n as f64 * 2.0_f64.min(n as f64)) {
                    transitions.push((p.as_str(), a.as_str(), q.as_str()));
                }
            }
        }
    }
    let mut start: Vec<&str> = states.iter().filter(|_| rng.gen_bool(0.3)).map(String::as_str).collect();
    if start.is_empty() {
        start.push(&states[0]);
    }
    let finals: Vec<&str> = states.iter().filter(|_| rng.gen_bool(0.4)).map(String::as_str).collect();
    let alphabet: Vec<&str> = letters.iter().map(String::as_str).collect();
    let names: Vec<&str> = states.iter().map(String::as_str).collect();
    Nfa::build(&alphabet, &names, &start, &finals, &transitions).expect("generated automata are well formed")
}

pub fn accepts(nfa: &Nfa, w: &[Symbol]) -> bool {
    nfa.accepts(w).unwrap_or(false)
}

pub fn syms(letters: &[&str]) -> Vec<Symbol> {
    letters.iter().map(Symbol::new).collect()
}

pub fn domain(letters: &[&str]) -> BTreeSet<Symbol> {
    letters.iter().map(Symbol::new).collect()
}

pub fn set_of(words: impl IntoIterator<Item = Word>) -> BTreeSet<Word> {
    words.into_iter().collect()
}

/// Whether `w` is a prefix of some word generated by the grammar, straight
/// from derivations: `exact[i][j]` holds the nonterminals deriving `w[i..j]`,
/// `open[i]` those deriving a word that starts with `w[i..]`.
pub fn grammar_prefix(g: &opencons::grammar::CnfGrammar, w: &[Symbol]) -> bool {
    use opencons::grammar::RhsJson;
    use std::collections::HashSet;

    let raw = g.to_json();
    let mut pairs: Vec<(String, String, String)> = Vec::new();
    let mut units: Vec<(String, String)> = Vec::new();
    for p in &raw.productions {
        match &p.rhs {
            RhsJson::Pair(v) => pairs.push((p.lhs.clone(), v[0].clone(), v[1].clone())),
            RhsJson::Single(s) if s == "eps" => {}
            RhsJson::Single(s) => units.push((p.lhs.clone(), s.clone())),
        }
    }
    // the closure always contains the empty word, even for an empty language
    if w.is_empty() {
        return true;
    }
    let productive = productive_nonterminals(&pairs, &units);
    let n = w.len();
    let mut exact = vec![vec![HashSet::<String>::new(); n + 1]; n + 1];
    for i in 0..n {
        for (a, t) in &units {
            if t == w[i].as_str() {
                exact[i][i + 1].insert(a.clone());
            }
        }
    }
    for span in 2..=n {
        for i in 0..=n - span {
            let j = i + span;
            for k in i + 1..j {
                for (a, b, c) in &pairs {
                    if exact[i][k].contains(b) && exact[k][j].contains(c) {
                        exact[i][j].insert(a.clone());
                    }
                }
            }
        }
    }
    let mut open = vec![HashSet::<String>::new(); n + 1];
    for i in (0..n).rev() {
        let mut set: HashSet<String> = exact[i][n].clone();
        loop {
            let before = set.len();
            for (a, b, c) in &pairs {
                let split = (i + 1..n).any(|k| exact[i][k].contains(b) && open[k].contains(c));
                let left = set.contains(b) && productive.contains(c);
                if split || left {
                    set.insert(a.clone());
                }
            }
            if set.len() == before {
                break;
            }
        }
        open[i] = set;
    }
    open[0].contains(&raw.start)
}

fn productive_nonterminals(
    pairs: &[(String, String, String)],
    units: &[(String, String)],
) -> std::collections::HashSet<String> {
    let mut productive: std::collections::HashSet<String> = units.iter().map(|(a, _)| a.clone()).collect();
    loop {
        let before = productive.len();
        for (a, b, c) in pairs {
            if productive.contains(b) && productive.contains(c) {
                productive.insert(a.clone());
            }
        }
        if productive.len() == before {
            return productive;
        }
    }
}

/// A spread of small catalog constraints, each over a type of at most three
/// values so that words up to length 7 stay cheap to enumerate.
pub fn catalog() -> Vec<(&'static str, opencons::algebra::CatalogSpec)> {
    use serde_json::json;
    let a_or_bb = serde_json::to_value(opencons::fixtures::a_or_bb().to_json()).unwrap();
    let abc = serde_json::to_value(opencons::fixtures::abc_star().to_json()).unwrap();
    let anbn = serde_json::to_value(opencons::fixtures::g_anbn().to_json()).unwrap();
    let dyck = serde_json::to_value(opencons::fixtures::g_dyck().to_json()).unwrap();
    let specs = vec![
        ("alldifferent", json!({"kind": "alldifferent", "type": [1, 2, 3]})),
        ("gcc", json!({"kind": "gcc", "values": [1, 2], "lower": [0, 1], "upper": [2, 2], "type": [1, 2, 3]})),
        ("weak_gcc", json!({"kind": "weak_gcc", "values": [1, 2], "upper": [1, 2], "type": [1, 2, 3]})),
        ("nvalue_eq", json!({"kind": "nvalue", "relation": "=", "n": 2, "type": [1, 2, 3]})),
        ("nvalue_le", json!({"kind": "nvalue", "relation": "<=", "n": 2, "type": [1, 2, 3]})),
        ("nvalue_ge", json!({"kind": "nvalue", "relation": ">=", "n": 2, "type": [1, 2, 3]})),
        ("sequence", json!({"kind": "sequence", "lower": 1, "upper": 2, "k": 3, "values": [1], "type": [0, 1]})),
        ("sliding_sum", json!({"kind": "sliding_sum", "lower": 1, "upper": 3, "k": 2, "type": [0, 1, 2]})),
        ("among", json!({"kind": "among", "lower": 1, "upper": 2, "values": [2], "type": [1, 2]})),
        ("sum_eq", json!({"kind": "sum", "relation": "=", "bound": 3, "type": [0, 1, 2]})),
        ("sum_le", json!({"kind": "sum", "relation": "<=", "bound": 3, "type": [0, 1, 2]})),
        ("sum_ge", json!({"kind": "sum", "relation": ">=", "bound": 3, "type": [0, 1, 2]})),
        ("sum_signed", json!({"kind": "sum", "relation": "<=", "bound": 1, "type": [-1, 0, 1]})),
        ("lex_leq", json!({"kind": "lex_leq", "z": [1, 1, 2], "type": [1, 2, 3]})),
        ("lex_lt", json!({"kind": "lex_lt", "z": [1, 1, 2], "type": [1, 2, 3]})),
        ("precedence", json!({"kind": "precedence", "s": 1, "t": 2, "type": [1, 2, 3]})),
        ("contiguity", json!({"kind": "contiguity"})),
        ("peak_eq", json!({"kind": "peak", "relation": "=", "bound": 1, "type": [1, 2, 3]})),
        ("peak_le", json!({"kind": "peak", "relation": "<=", "bound": 1, "type": [1, 2, 3]})),
        ("peak_ge", json!({"kind": "peak", "relation": ">=", "bound": 1, "type": [1, 2, 3]})),
        ("no_peak", json!({"kind": "no_peak", "type": [1, 2, 3]})),
        ("average", json!({"kind": "average", "relation": "=", "bound": 2, "type": [1, 2, 3]})),
        ("regular_a_or_bb", json!({"kind": "regular", "automaton": a_or_bb})),
        ("regular_abc", json!({"kind": "regular", "automaton": abc})),
        ("cfg_anbn", json!({"kind": "cfg", "grammar": anbn})),
        ("cfg_dyck", json!({"kind": "cfg", "grammar": dyck})),
    ];
    specs.into_iter().map(|(n, v)| (n, serde_json::from_value(v).expect("catalog fixture parses"))).collect()
}
