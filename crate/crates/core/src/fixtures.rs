//! Small automata and grammars used across tests, examples and the CLI.

use crate::automata::Nfa;
use crate::grammar::CnfGrammar;

/// `(abc)*`.
pub fn abc_star() -> Nfa {
    Nfa::build(
        &["a", "b", "c"],
        &["0", "1", "2"],
        &["0"],
        &["0"],
        &[("0", "a", "1"), ("1", "b", "2"), ("2", "c", "0")],
    )
    .unwrap()
}

/// `(abc)*` with extra final states: `finals` is any subset of `{0, 1, 2}`,
/// where state 1 adds `(abc)*a` and state 2 adds `(abc)*ab`.
pub fn abc_cycle(finals: &[usize]) -> Nfa {
    abc_star().with_finals(finals)
}

/// `(ab)* + (ab)*a`.
pub fn ab_star_or_a() -> Nfa {
    Nfa::build(&["a", "b"], &["0", "1"], &["0"], &["0", "1"], &[("0", "a", "1"), ("1", "b", "0")]).unwrap()
}

/// `a + bb`.
pub fn a_or_bb() -> Nfa {
    Nfa::build(
        &["a", "b"],
        &["q0", "q1", "q2", "q3"],
        &["q0"],
        &["q1", "q3"],
        &[("q0", "a", "q1"), ("q0", "b", "q2"), ("q2", "b", "q3")],
    )
    .unwrap()
}

/// `a*` over `{a, b}`.
pub fn a_star() -> Nfa {
    Nfa::build(&["a", "b"], &["s"], &["s"], &["s"], &[("s", "a", "s")]).unwrap()
}

/// A nondeterministic automaton for words over `{a, b}` whose second-to-last
/// letter is `a`.
pub fn second_last_a() -> Nfa {
    Nfa::build(
        &["a", "b"],
        &["s", "t", "u"],
        &["s"],
        &["u"],
        &[("s", "a", "s"), ("s", "b", "s"), ("s", "a", "t"), ("t", "a", "u"), ("t", "b", "u")],
    )
    .unwrap()
}

pub fn automata() -> Vec<(&'static str, Nfa)> {
    vec![
        ("abc_star", abc_star()),
        ("ab_star_or_a", ab_star_or_a()),
        ("a_or_bb", a_or_bb()),
        ("a_star", a_star()),
        ("second_last_a", second_last_a()),
    ]
}

fn grammar(text: &str) -> CnfGrammar {
    CnfGrammar::from_json_str(text).unwrap()
}

/// `{ab}`.
pub fn g_ab() -> CnfGrammar {
    grammar(
        r#"{"nonterminals":["S","A","B"],"terminals":["a","b"],"start":"S",
            "productions":[{"lhs":"S","rhs":["A","B"]},{"lhs":"A","rhs":"a"},{"lhs":"B","rhs":"b"}]}"#,
    )
}

/// `a^n b^n`, `n >= 1`.
pub fn g_anbn() -> CnfGrammar {
    grammar(
        r#"{"nonterminals":["S","T","A","B"],"terminals":["a","b"],"start":"S",
            "productions":[{"lhs":"S","rhs":["A","T"]},{"lhs":"S","rhs":["A","B"]},
                           {"lhs":"T","rhs":["S","B"]},{"lhs":"A","rhs":"a"},{"lhs":"B","rhs":"b"}]}"#,
    )
}

/// Balanced brackets with `a` opening and `b` closing, including the empty
/// word.
pub fn g_dyck() -> CnfGrammar {
    grammar(
        r#"{"nonterminals":["Z","D","E","L","R"],"terminals":["a","b"],"start":"Z",
            "productions":[{"lhs":"Z","rhs":"eps"},{"lhs":"Z","rhs":["L","R"]},{"lhs":"Z","rhs":["L","E"]},
                           {"lhs":"Z","rhs":["D","D"]},{"lhs":"D","rhs":["L","R"]},{"lhs":"D","rhs":["L","E"]},
                           {"lhs":"D","rhs":["D","D"]},{"lhs":"E","rhs":["D","R"]},
                           {"lhs":"L","rhs":"a"},{"lhs":"R","rhs":"b"}]}"#,
    )
}

pub fn grammars() -> Vec<(&'static str, CnfGrammar)> {
    vec![("g_ab", g_ab()), ("g_anbn", g_anbn()), ("g_dyck", g_dyck())]
}
