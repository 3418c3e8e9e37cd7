//! Brute-force reference implementations.
//!
//! Everything here is a direct transcription of a definition, with no
//! cleverness beyond what is needed to terminate. Tests compare the real
//! algorithms against these on small instances.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::softedit::EditWeights;
use crate::symbol::{Symbol, Word};

/// Membership test for a language over symbols.
pub type Membership<'a> = &'a dyn Fn(&[Symbol]) -> bool;

/// All words over `alphabet` of length at most `max_len`, in shortlex order.
pub fn words_up_to(alphabet: &[Symbol], max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for a in alphabet {
                let mut v = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Words of exactly length `n` whose i-th letter is drawn from `domains[i]`.
pub fn words_in(domains: &[BTreeSet<Symbol>]) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Vec::new()];
    for d in domains {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for w in &out {
            for a in d {
                let mut v = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub fn enumerate_language(member: Membership, alphabet: &[Symbol], max_len: usize) -> Vec<Word> {
    words_up_to(alphabet, max_len).into_iter().filter(|w| member(w)).collect()
}

/// Every prefix of every given word.
pub fn prefix_set(words: &[Word]) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for w in words {
        for k in 0..=w.len() {
            out.insert(w[..k].to_vec());
        }
    }
    out
}

/// Outcome of a bounded closure check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureVerdict {
    Holds,
    Fails { member: Word, reduced: Word },
}

impl ClosureVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ClosureVerdict::Holds)
    }
}

/// Checks that the one-letter-shorter prefix of every member up to
/// `max_len` is again a member.
pub fn contractible_bruteforce(member: Membership, alphabet: &[Symbol], max_len: usize) -> ClosureVerdict {
    for w in words_up_to(alphabet, max_len) {
        if !w.is_empty() && member(&w) && !member(&w[..w.len() - 1]) {
            let reduced = w[..w.len() - 1].to_vec();
            return ClosureVerdict::Fails { member: w, reduced };
        }
    }
    ClosureVerdict::Holds
}

/// Checks `m(w) <= m(w y)` for all words up to `max_len`.
pub fn nondecreasing_bruteforce(
    measure: &dyn Fn(&[Symbol]) -> Result<Cost>,
    alphabet: &[Symbol],
    max_len: usize,
) -> Result<ClosureVerdict> {
    let words = words_up_to(alphabet, max_len);
    let mut value: HashMap<Word, Cost> = HashMap::new();
    for w in &words {
        value.insert(w.clone(), measure(w)?);
    }
    for w in &words {
        if w.is_empty() {
            continue;
        }
        let prefix = &w[..w.len() - 1];
        if value[prefix] > value[w] {
            return Ok(ClosureVerdict::Fails { member: w.clone(), reduced: prefix.to_vec() });
        }
    }
    Ok(ClosureVerdict::Holds)
}

/// Filters each domain down to values that occur in some word `d_1..d_m`
/// of the language with `n <= m <= n + extra`, `d_i` in the i-th domain for
/// `i <= n` and the remaining letters drawn from `ext_alphabet`.
///
/// With `extra = 0` this is plain domain consistency.
pub fn open_dconsistency_bruteforce(
    member: Membership,
    domains: &[BTreeSet<Symbol>],
    ext_alphabet: &[Symbol],
    extra: usize,
) -> Vec<BTreeSet<Symbol>> {
    let tails = words_up_to(ext_alphabet, extra);
    let mut kept = vec![BTreeSet::new(); domains.len()];
    for head in words_in(domains) {
        let supported = tails.iter().any(|t| {
            let mut w = head.clone();
            w.extend(t.iter().cloned());
            member(&w)
        });
        if supported {
            for (i, a) in head.iter().enumerate() {
                kept[i].insert(a.clone());
            }
        }
    }
    kept
}

/// True when some word of length `domains.len() + k`, `k <= extra`, is a
/// member with its first letters inside the domains. Used for the zero
/// variable case, where no domain can witness satisfiability.
pub fn has_support(
    member: Membership,
    domains: &[BTreeSet<Symbol>],
    ext_alphabet: &[Symbol],
    extra: usize,
) -> bool {
    let tails = words_up_to(ext_alphabet, extra);
    words_in(domains).iter().any(|head| {
        tails.iter().any(|t| {
            let mut w = head.clone();
            w.extend(t.iter().cloned());
            member(&w)
        })
    })
}

/// Weighted edit distance from `w` into a language, by uniform-cost search
/// over whole words.
///
/// Inserted and substituted letters come from `alphabet`. Words costing
/// more than `cap` are pruned; finding nothing within the cap, or expanding
/// more than `budget` words, is a resource error.
pub fn edit_distance_bruteforce(
    member: Membership,
    alphabet: &[Symbol],
    weights: &EditWeights,
    w: &[Symbol],
    cap: Cost,
    budget: usize,
) -> Result<Cost> {
    // Words are searched as byte strings over alphabet plus the letters of w.
    let mut letters: Vec<Symbol> = alphabet.to_vec();
    for a in w {
        if !letters.contains(a) {
            letters.push(a.clone());
        }
    }
    if letters.len() > u8::MAX as usize {
        return Err(Error::input("alphabet too large for the brute-force edit search"));
    }
    let code = |a: &Symbol| letters.iter().position(|b| b == a).unwrap() as u8;
    let start: Vec<u8> = w.iter().map(code).collect();
    let editable = alphabet.len() as u8;
    let decode = |v: &[u8]| -> Word { v.iter().map(|&i| letters[i as usize].clone()).collect() };

    let mut best: HashMap<Vec<u8>, Cost> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(start.clone(), Cost::ZERO);
    heap.push(Reverse((Cost::ZERO, start)));
    let mut expanded = 0usize;
    while let Some(Reverse((cost, word))) = heap.pop() {
        if best.get(&word).is_some_and(|&c| c < cost) {
            continue;
        }
        if member(&decode(&word)) {
            return Ok(cost);
        }
        expanded += 1;
        if expanded > budget {
            return Err(Error::resource(format!("edit search expanded more than {budget} words")));
        }
        let mut push = |next: Vec<u8>, step: Cost| {
            let c = cost + step;
            if c > cap || c.is_infinite() {
                return;
            }
            if best.get(&next).is_none_or(|&old| c < old) {
                best.insert(next.clone(), c);
                heap.push(Reverse((c, next)));
            }
        };
        for i in 0..word.len() {
            for a in 0..editable {
                if a != word[i] {
                    let mut v = word.clone();
                    v[i] = a;
                    push(v, weights.alpha);
                }
            }
            let mut v = word.clone();
            v.remove(i);
            push(v, weights.gamma);
            if i + 1 < word.len() && word[i] != word[i + 1] {
                let mut v = word.clone();
                v.swap(i, i + 1);
                push(v, weights.delta);
            }
        }
        for i in 0..=word.len() {
            for a in 0..editable {
                let mut v = word.clone();
                v.insert(i, a);
                push(v, weights.beta);
            }
        }
    }
    Err(Error::Resource { what: format!("no edit within cost {cap}"), best: None })
}
