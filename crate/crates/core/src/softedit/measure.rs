use std::collections::{BTreeSet, HashSet, VecDeque};

use num_rational::Rational64;
use serde::Serialize;

use super::script::{Alignment, EditScript, Slot};
use super::search::{Found, Move, Search};
use super::{approximation_weights, EditWeights};
use crate::automata::Nfa;
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::oracle::words_up_to;
use crate::symbol::{Symbol, Word};

pub const DEFAULT_SEARCH_BUDGET: usize = 5_000_000;

/// Weighted edit distance into the prefix closure of a regular language.
#[derive(Debug, Clone)]
pub struct OpenEditMeasure {
    language: Nfa,
    target: Nfa,
    weights: EditWeights,
    static_type: Option<BTreeSet<Symbol>>,
    budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub cost: Cost,
    /// `None` when no edit reaches the language.
    pub script: Option<EditScript>,
}

impl OpenEditMeasure {
    pub fn new(language: Nfa, weights: EditWeights) -> Self {
        let target = language.prefix_closure();
        OpenEditMeasure { language, target, weights, static_type: None, budget: DEFAULT_SEARCH_BUDGET }
    }

    /// Edit distance into the language itself, without closing it under
    /// prefixes.
    pub fn into_language(language: Nfa, weights: EditWeights) -> Self {
        let target = language.clone();
        OpenEditMeasure { language, target, weights, static_type: None, budget: DEFAULT_SEARCH_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Restricts input words to the given symbols. Symbols outside the
    /// language's alphabet are still accepted if they are listed here.
    pub fn with_static_type(mut self, symbols: impl IntoIterator<Item = Symbol>) -> Self {
        self.static_type = Some(symbols.into_iter().collect());
        self
    }

    pub fn reweighted(&self, weights: EditWeights) -> Self {
        OpenEditMeasure { weights, ..self.clone() }
    }

    pub fn language(&self) -> &Nfa {
        &self.language
    }

    /// The automaton edits are measured against.
    pub fn target(&self) -> &Nfa {
        &self.target
    }

    pub fn weights(&self) -> &EditWeights {
        &self.weights
    }

    fn encode(&self, w: &[Symbol]) -> Result<Vec<Option<usize>>> {
        w.iter()
            .map(|a| {
                if let Some(t) = &self.static_type {
                    if !t.contains(a) {
                        return Err(Error::UnknownSymbol(a.to_string()));
                    }
                }
                Ok(self.target.symbol_index(a))
            })
            .collect()
    }

    fn search(&self, word: &[Option<usize>], transpose: bool, extend: bool, upper: Option<u64>) -> Result<Option<Found>> {
        let (weights, _) = self.weights.scaled()?;
        Search { nfa: &self.target, word, weights, transpose, extend, upper, budget: self.budget }.run()
    }

    fn unscale(&self, v: u64) -> Result<Cost> {
        let (_, denom) = self.weights.scaled()?;
        Ok(Cost::Finite(Rational64::new(v as i64, denom)))
    }

    pub fn value(&self, w: &[Symbol]) -> Result<Cost> {
        Ok(self.evaluate(w)?.cost)
    }

    /// Exact measure with a witnessing script in normal form.
    pub fn evaluate(&self, w: &[Symbol]) -> Result<Evaluation> {
        let word = self.encode(w)?;
        let plain = self.search(&word, false, false, None)?;
        let best = match (&plain, self.weights.delta.is_infinite()) {
            (Some(found), false) if found.cost > 0 => {
                match self.search(&word, true, false, Some(found.cost)) {
                    Ok(better) => better,
                    Err(Error::Resource { what, .. }) => {
                        return Err(Error::Resource { what, best: Some(self.unscale(found.cost)?) })
                    }
                    Err(e) => return Err(e),
                }
            }
            (None, false) => self.search(&word, true, false, None)?,
            _ => plain,
        };
        match best {
            None => Ok(Evaluation { cost: Cost::Infinite, script: None }),
            Some(found) => Ok(Evaluation {
                cost: self.unscale(found.cost)?,
                script: Some(self.script(w, &found.moves)),
            }),
        }
    }

    // Extension letters become extra source letters after the word.
    fn script(&self, w: &[Symbol], moves: &[Move]) -> EditScript {
        let mut source = w.to_vec();
        let mut slots = Vec::new();
        let alphabet = self.target.alphabet();
        for mv in moves {
            match *mv {
                Move::Delete(_) => {}
                Move::Place(j, a) => slots.push(Slot::Kept { origin: j, symbol: alphabet[a].clone() }),
                Move::Insert(a) => slots.push(Slot::Inserted(alphabet[a].clone())),
                Move::Extend(a) => {
                    slots.push(Slot::Kept { origin: source.len(), symbol: alphabet[a].clone() });
                    source.push(alphabet[a].clone());
                }
            }
        }
        Alignment { source, slots }.to_script()
    }

    /// The infimum of `m(w b)` over all finite extensions `b`, with an
    /// extension attaining it.
    ///
    /// Letters of `b` are never worth editing, so they act as free letters
    /// that may be placed anywhere, paying one transposition for each input
    /// letter they overtake.
    pub fn infimum_over_extensions(&self, w: &[Symbol]) -> Result<(Cost, Word)> {
        let word = self.encode(w)?;
        let upper = self.evaluate(w)?.cost;
        let (weights, _) = self.weights.scaled()?;
        let upper_scaled = match upper {
            Cost::Infinite => None,
            Cost::Finite(r) => Some((r * Rational64::from_integer(self.weights.scaled()?.1)).to_integer() as u64),
        };
        let found = Search {
            nfa: &self.target,
            word: &word,
            weights,
            transpose: true,
            extend: true,
            upper: upper_scaled,
            budget: self.budget,
        }
        .run()?;
        match found {
            None => Ok((Cost::Infinite, Vec::new())),
            Some(f) => {
                let ext = f
                    .moves
                    .iter()
                    .filter_map(|m| match m {
                        Move::Extend(a) => Some(self.target.alphabet()[*a].clone()),
                        _ => None,
                    })
                    .collect();
                Ok((self.unscale(f.cost)?, ext))
            }
        }
    }
}

pub fn open_edit_measure(m: &OpenEditMeasure, w: &[Symbol]) -> Result<Evaluation> {
    m.evaluate(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApproxValues {
    pub m1: Cost,
    pub m2: Cost,
    pub m3: Cost,
    pub m4: Cost,
    pub m5: Cost,
}

/// Values of the four reweighted measures and their pointwise maximum.
pub fn approx_measures(m: &OpenEditMeasure, w: &[Symbol]) -> Result<ApproxValues> {
    let [w1, w2, w3, w4] = approximation_weights(m.weights());
    let m1 = m.reweighted(w1).value(w)?;
    let m2 = m.reweighted(w2).value(w)?;
    let m3 = m.reweighted(w3).value(w)?;
    let m4 = m.reweighted(w4).value(w)?;
    let m5 = m1.max(m2).max(m3).max(m4);
    Ok(ApproxValues { m1, m2, m3, m4, m5 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MStarStatus {
    Exact,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MStar {
    pub value: Cost,
    pub status: MStarStatus,
    pub ext: Word,
    pub max_ext: usize,
}

/// Minimum of `m(w b)` over extensions `b` of length at most `max_ext`.
///
/// The value is reported exact when it is zero or matches the infimum over
/// all extensions.
pub fn m_star_bounded(m: &OpenEditMeasure, w: &[Symbol], max_ext: usize) -> Result<MStar> {
    let mut best: Option<(Cost, Word)> = None;
    for ext in words_up_to(m.target().alphabet(), max_ext) {
        let mut v = w.to_vec();
        v.extend(ext.iter().cloned());
        let c = m.value(&v)?;
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, ext));
        }
    }
    let (value, ext) = best.expect("the empty extension is always tried");
    let status = if value.is_zero() {
        MStarStatus::Exact
    } else {
        match m.infimum_over_extensions(w) {
            Ok((inf, _)) if inf == value => MStarStatus::Exact,
            Ok(_) | Err(Error::Resource { .. }) => MStarStatus::UpperBound,
            Err(e) => return Err(e),
        }
    };
    Ok(MStar { value, status, ext, max_ext })
}

/// Which zero pattern of the weights applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProperCase {
    AllPositive,
    FreeSubstitution,
    FreeInsertion,
    FreeDeletion,
    FreeTransposition,
    FreeSubstitutionAndInsertion,
    FreeInsertionAndTransposition,
}

impl ProperCase {
    pub fn of(w: &EditWeights) -> ProperCase {
        let (a, b, g, d) = (w.alpha.is_zero(), w.beta.is_zero(), w.gamma.is_zero(), w.delta.is_zero());
        match () {
            _ if g => ProperCase::FreeDeletion,
            _ if a && b => ProperCase::FreeSubstitutionAndInsertion,
            _ if a => ProperCase::FreeSubstitution,
            _ if b && d => ProperCase::FreeInsertionAndTransposition,
            _ if b => ProperCase::FreeInsertion,
            _ if d => ProperCase::FreeTransposition,
            _ => ProperCase::AllPositive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Properness {
    Proper,
    Improper { witness: Word },
    /// No counterexample among words up to the bound.
    Indeterminate { checked_up_to: usize },
}

/// Decides whether only members of the prefix closure get measure zero,
/// among the words of `ambient` up to `max_len`.
pub fn properness_status(m: &OpenEditMeasure, ambient: &Nfa, max_len: usize) -> Result<Properness> {
    let case = ProperCase::of(m.weights());
    if case == ProperCase::AllPositive {
        return Ok(Properness::Proper);
    }
    let closure = Closure::new(m.target());
    for w in words_up_to(ambient.alphabet(), max_len) {
        if !ambient.accepts(&w)? || closure.accepts(&w) {
            continue;
        }
        let zero = match case {
            ProperCase::AllPositive => false,
            ProperCase::FreeSubstitution => closure.has_length(w.len()),
            ProperCase::FreeInsertion => closure.has_supersequence(&w),
            ProperCase::FreeDeletion => true,
            ProperCase::FreeTransposition => closure.has_permutation(&w),
            ProperCase::FreeSubstitutionAndInsertion => closure.has_length_at_least(w.len()),
            ProperCase::FreeInsertionAndTransposition => closure.has_superset(&w),
        };
        if zero {
            return Ok(Properness::Improper { witness: w });
        }
    }
    Ok(Properness::Indeterminate { checked_up_to: max_len })
}

// Word questions about the language of an automaton.
struct Closure<'a> {
    nfa: &'a Nfa,
    live: Vec<bool>,
}

impl<'a> Closure<'a> {
    fn new(nfa: &'a Nfa) -> Self {
        Closure { nfa, live: nfa.coreachable() }
    }

    fn accepts(&self, w: &[Symbol]) -> bool {
        self.nfa.accepts(w).unwrap_or(false)
    }

    fn letters(&self, w: &[Symbol]) -> Option<Vec<usize>> {
        w.iter().map(|a| self.nfa.symbol_index(a)).collect()
    }

    fn layer(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.nfa.alphabet().len()).flat_map(|a| self.nfa.step(set, a)).collect()
    }

    fn has_length(&self, n: usize) -> bool {
        let mut set: BTreeSet<usize> = self.nfa.start().iter().copied().collect();
        for _ in 0..n {
            set = self.layer(&set);
        }
        set.iter().any(|&q| self.nfa.is_final(q))
    }

    fn has_length_at_least(&self, n: usize) -> bool {
        (n..=n + self.nfa.num_states()).any(|k| self.has_length(k))
    }

    fn reach_any(&self, set: BTreeSet<usize>) -> BTreeSet<usize> {
        let mut seen = set.clone();
        let mut queue: VecDeque<usize> = set.into_iter().collect();
        while let Some(q) = queue.pop_front() {
            for a in 0..self.nfa.alphabet().len() {
                for &t in self.nfa.successors(q, a) {
                    if seen.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    fn has_supersequence(&self, w: &[Symbol]) -> bool {
        let Some(letters) = self.letters(w) else { return false };
        let mut set = self.reach_any(self.nfa.start().iter().copied().collect());
        for a in letters {
            set = self.reach_any(self.nfa.step(&set, a));
        }
        set.iter().any(|&q| self.live[q])
    }

    // Search over (state, letters still owed). With `free` set, transitions
    // that use no owed letter are allowed too.
    fn owes(&self, w: &[Symbol], free: bool) -> bool {
        let Some(letters) = self.letters(w) else { return false };
        let mut owed = vec![0usize; self.nfa.alphabet().len()];
        for a in letters {
            owed[a] += 1;
        }
        let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
        let mut queue: VecDeque<(usize, Vec<usize>)> = VecDeque::new();
        for &q in self.nfa.start() {
            if seen.insert((q, owed.clone())) {
                queue.push_back((q, owed.clone()));
            }
        }
        while let Some((q, left)) = queue.pop_front() {
            if left.iter().all(|&c| c == 0) {
                let done = if free { self.live[q] } else { self.nfa.is_final(q) };
                if done {
                    return true;
                }
            }
            for a in 0..self.nfa.alphabet().len() {
                for &t in self.nfa.successors(q, a) {
                    if left[a] > 0 {
                        let mut next = left.clone();
                        next[a] -= 1;
                        if seen.insert((t, next.clone())) {
                            queue.push_back((t, next));
                        }
                    }
                    if free && seen.insert((t, left.clone())) {
                        queue.push_back((t, left.clone()));
                    }
                }
            }
        }
        false
    }

    fn has_permutation(&self, w: &[Symbol]) -> bool {
        self.owes(w, false)
    }

    fn has_superset(&self, w: &[Symbol]) -> bool {
        self.owes(w, true)
    }
}
