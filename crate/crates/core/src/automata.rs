//! Finite automata over symbol alphabets.
//!
//! States and symbols are stored by index; the names given in JSON are only
//! kept for printing. There are no epsilon transitions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionJson {
    pub from: String,
    pub symbol: Symbol,
    pub to: String,
}

/// Wire format shared by NFAs and DFAs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NfaJson {
    pub alphabet: Vec<Symbol>,
    pub states: Vec<String>,
    pub start: Vec<String>,
    #[serde(rename = "final")]
    pub finals: Vec<String>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<Symbol>,
    names: Vec<String>,
    start: Vec<usize>,
    finals: Vec<bool>,
    // delta[q][a] is a sorted, deduplicated list of targets
    delta: Vec<Vec<Vec<usize>>>,
}

/// Counters collected while computing a prefix closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClosureWork {
    pub states_visited: usize,
    pub edges_visited: usize,
}

impl Nfa {
    /// Builds an automaton from names. Mostly for tests and fixtures.
    pub fn build(
        alphabet: &[&str],
        states: &[&str],
        start: &[&str],
        finals: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Nfa> {
        let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Nfa::from_json(NfaJson {
            alphabet: alphabet.iter().map(|s| Symbol::new(*s)).collect(),
            states: owned(states),
            start: owned(start),
            finals: owned(finals),
            transitions: transitions
                .iter()
                .map(|(f, a, t)| TransitionJson {
                    from: f.to_string(),
                    symbol: Symbol::new(*a),
                    to: t.to_string(),
                })
                .collect(),
        })
    }

    pub fn from_json(raw: NfaJson) -> Result<Nfa> {
        let mut sym_index = HashMap::new();
        for (i, a) in raw.alphabet.iter().enumerate() {
            if sym_index.insert(a.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate alphabet symbol `{a}`")));
            }
        }
        let mut state_index = HashMap::new();
        for (i, q) in raw.states.iter().enumerate() {
            if state_index.insert(q.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate state `{q}`")));
            }
        }
        let lookup = |q: &str| {
            state_index
                .get(q)
                .copied()
                .ok_or_else(|| Error::input(format!("unknown state `{q}`")))
        };
        let n = raw.states.len();
        let k = raw.alphabet.len();
        let mut start = raw.start.iter().map(|q| lookup(q)).collect::<Result<Vec<_>>>()?;
        start.sort_unstable();
        start.dedup();
        let mut finals = vec![false; n];
        for q in &raw.finals {
            finals[lookup(q)?] = true;
        }
        let mut delta = vec![vec![Vec::new(); k]; n];
        for t in &raw.transitions {
            let a = *sym_index
                .get(&t.symbol)
                .ok_or_else(|| Error::input(format!("transition on unknown symbol `{}`", t.symbol)))?;
            delta[lookup(&t.from)?][a].push(lookup(&t.to)?);
        }
        for row in &mut delta {
            for targets in row.iter_mut() {
                targets.sort_unstable();
                targets.dedup();
            }
        }
        Ok(Nfa { alphabet: raw.alphabet, names: raw.states, start, finals, delta })
    }

    pub fn from_json_str(text: &str) -> Result<Nfa> {
        let raw: NfaJson =
            serde_json::from_str(text).map_err(|e| Error::input(format!("automaton JSON: {e}")))?;
        Nfa::from_json(raw)
    }

    /// Canonical wire form: transitions ordered by source, symbol, target.
    pub fn to_json(&self) -> NfaJson {
        let mut transitions = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (a, targets) in row.iter().enumerate() {
                for &t in targets {
                    transitions.push(TransitionJson {
                        from: self.names[q].clone(),
                        symbol: self.alphabet[a].clone(),
                        to: self.names[t].clone(),
                    });
                }
            }
        }
        NfaJson {
            alphabet: self.alphabet.clone(),
            states: self.names.clone(),
            start: self.start.iter().map(|&q| self.names[q].clone()).collect(),
            finals: (0..self.num_states())
                .filter(|&q| self.finals[q])
                .map(|q| self.names[q].clone())
                .collect(),
            transitions,
        }
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().flatten().map(Vec::len).sum()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn start(&self) -> &[usize] {
        &self.start
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn successors(&self, q: usize, a: usize) -> &[usize] {
        &self.delta[q][a]
    }

    pub fn symbol_index(&self, a: &Symbol) -> Option<usize> {
        self.alphabet.iter().position(|b| b == a)
    }

    /// Maps a word to symbol indices, rejecting symbols outside the alphabet.
    pub fn encode(&self, w: &[Symbol]) -> Result<Vec<usize>> {
        w.iter()
            .map(|a| self.symbol_index(a).ok_or_else(|| Error::UnknownSymbol(a.to_string())))
            .collect()
    }

    pub fn accepts(&self, w: &[Symbol]) -> Result<bool> {
        Ok(self.accepts_encoded(&self.encode(w)?))
    }

    pub fn accepts_encoded(&self, w: &[usize]) -> bool {
        let mut current: BTreeSet<usize> = self.start.iter().copied().collect();
        for &a in w {
            current = self.step(&current, a);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&q| self.finals[q])
    }

    pub fn step(&self, set: &BTreeSet<usize>, a: usize) -> BTreeSet<usize> {
        set.iter().flat_map(|&q| self.delta[q][a].iter().copied()).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.start.len() == 1 && self.delta.iter().flatten().all(|t| t.len() <= 1)
    }

    /// States reachable from a start state.
    pub fn reachable(&self) -> Vec<bool> {
        self.reachable_counted(&mut ClosureWork::default())
    }

    fn reachable_counted(&self, work: &mut ClosureWork) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = Vec::new();
        for &q in &self.start {
            if !seen[q] {
                seen[q] = true;
                stack.push(q);
            }
        }
        while let Some(q) = stack.pop() {
            work.states_visited += 1;
            for targets in &self.delta[q] {
                for &t in targets {
                    work.edges_visited += 1;
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let all = vec![true; self.num_states()];
        self.coreachable_within(&all, &mut ClosureWork::default())
    }

    // Reverse search from the finals, restricted to states flagged in `within`.
    fn coreachable_within(&self, within: &[bool], work: &mut ClosureWork) -> Vec<bool> {
        let n = self.num_states();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (q, row) in self.delta.iter().enumerate() {
            if !within[q] {
                continue;
            }
            for targets in row {
                for &t in targets {
                    if within[t] {
                        reverse[t].push(q);
                    }
                }
            }
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&q| within[q] && self.finals[q]).collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            work.states_visited += 1;
            for &p in &reverse[q] {
                work.edges_visited += 1;
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Automaton for the prefix closure of the language: every state that is
    /// both reachable and co-reachable becomes final.
    pub fn prefix_closure(&self) -> Nfa {
        self.prefix_closure_with_work().0
    }

    pub fn prefix_closure_with_work(&self) -> (Nfa, ClosureWork) {
        let mut work = ClosureWork::default();
        let reach = self.reachable_counted(&mut work);
        let useful = self.coreachable_within(&reach, &mut work);
        let mut closed = self.clone();
        for q in 0..self.num_states() {
            if useful[q] {
                closed.finals[q] = true;
            }
        }
        (closed, work)
    }

    /// States that become final in the prefix closure.
    pub fn promoted_states(&self) -> Vec<usize> {
        let closed = self.prefix_closure();
        (0..self.num_states()).filter(|&q| closed.finals[q] && !self.finals[q]).collect()
    }

    /// Copy with a different set of final states.
    pub fn with_finals(&self, finals: &[usize]) -> Nfa {
        let mut out = self.clone();
        out.finals = vec![false; self.num_states()];
        for &q in finals {
            out.finals[q] = true;
        }
        out
    }
}

/// A deterministic automaton: one start state and at most one successor per
/// state and symbol. Transitions may be partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa(Nfa);

impl Dfa {
    pub fn new(nfa: Nfa) -> Result<Dfa> {
        if !nfa.is_deterministic() {
            return Err(Error::input("automaton is not deterministic"));
        }
        Ok(Dfa(nfa))
    }

    pub fn as_nfa(&self) -> &Nfa {
        &self.0
    }

    pub fn into_nfa(self) -> Nfa {
        self.0
    }

    /// Linear test: the language is prefix-closed iff the prefix closure adds
    /// no final state.
    pub fn is_prefix_closed(&self) -> bool {
        self.prefix_closed_with_work().0
    }

    pub fn prefix_closed_with_work(&self) -> (bool, ClosureWork) {
        let (closed, work) = self.0.prefix_closure_with_work();
        (closed.finals == self.0.finals, work)
    }
}

/// Subset construction over reachable subsets, giving up beyond `max_states`.
pub fn determinize(nfa: &Nfa, max_states: usize) -> Result<Dfa> {
    let k = nfa.alphabet.len();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut delta: Vec<Vec<Vec<usize>>> = Vec::new();
    index.insert(nfa.start.clone(), 0);
    subsets.push(nfa.start.clone());
    let mut next = 0;
    while next < subsets.len() {
        let current = subsets[next].clone();
        let mut row = vec![Vec::new(); k];
        for (a, slot) in row.iter_mut().enumerate() {
            let mut target: Vec<usize> =
                current.iter().flat_map(|&q| nfa.delta[q][a].iter().copied()).collect();
            target.sort_unstable();
            target.dedup();
            if target.is_empty() {
                continue;
            }
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= max_states {
                        return Err(Error::resource(format!(
                            "determinization needs more than {max_states} states"
                        )));
                    }
                    let id = subsets.len();
                    index.insert(target.clone(), id);
                    subsets.push(target);
                    id
                }
            };
            slot.push(id);
        }
        delta.push(row);
        next += 1;
    }
    let names = subsets
        .iter()
        .map(|s| {
            let inner: Vec<&str> = s.iter().map(|&q| nfa.names[q].as_str()).collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect();
    let finals = subsets.iter().map(|s| s.iter().any(|&q| nfa.finals[q])).collect();
    Ok(Dfa(Nfa { alphabet: nfa.alphabet.clone(), names, start: vec![0], finals, delta }))
}

pub const DEFAULT_MAX_DFA_STATES: usize = 10_000;
