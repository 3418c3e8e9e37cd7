//! Uniform-cost search for weighted edit distance into a regular language.
//!
//! Any edit sequence can be put in the order deletions, transpositions,
//! substitutions, insertions without raising its cost, so an optimal edit is
//! described by which letters are deleted, the order in which the surviving
//! letters appear, their final symbols and the inserted letters. The search
//! builds the target word left to right while running the automaton, and a
//! node records the automaton state plus the set of input letters already
//! placed or deleted. Placing letter `j` while `k` earlier letters are still
//! pending costs `k` transpositions.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use crate::automata::Nfa;
use crate::error::{Error, Result};

/// Weights scaled to integers; `None` forbids the operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Scaled {
    pub alpha: Option<u64>,
    pub beta: Option<u64>,
    pub gamma: Option<u64>,
    pub delta: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Move {
    Delete(usize),
    /// Place input letter `j` reading symbol `a` (a substitution if `a`
    /// differs from the letter).
    Place(usize, usize),
    Insert(usize),
    /// Append a free extension letter (only when searching for the
    /// infimum over extensions).
    Extend(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Found {
    pub cost: u64,
    pub moves: Vec<Move>,
}

pub(crate) struct Search<'a> {
    pub nfa: &'a Nfa,
    /// Letters as symbol indices of `nfa`; `None` for foreign letters.
    pub word: &'a [Option<usize>],
    pub weights: Scaled,
    pub transpose: bool,
    pub extend: bool,
    pub upper: Option<u64>,
    pub budget: usize,
}

type Node = (usize, u128);

impl Search<'_> {
    pub fn run(&self) -> Result<Option<Found>> {
        let n = self.word.len();
        if n > 127 {
            return Err(Error::input("words longer than 127 letters are not supported"));
        }
        let full: u128 = if n == 0 { 0 } else { (1u128 << n) - 1 };
        let transpose = self.transpose && self.weights.delta.is_some();
        let delta = self.weights.delta.unwrap_or(0);

        let mut dist: HashMap<Node, (u64, u32)> = HashMap::new();
        let mut parent: HashMap<Node, (Node, Move)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        for &q in self.nfa.start() {
            dist.insert((q, 0), (0, 0));
            heap.push(Reverse((0u64, 0u32, q, 0u128)));
        }
        let mut popped = 0usize;
        while let Some(Reverse((cost, ops, q, mask))) = heap.pop() {
            if dist.get(&(q, mask)).is_some_and(|&d| d < (cost, ops)) {
                continue;
            }
            if mask == full && self.nfa.is_final(q) {
                return Ok(Some(Found { cost, moves: self.path(&parent, (q, mask)) }));
            }
            popped += 1;
            if popped > self.budget {
                return Err(Error::resource(format!("edit search visited more than {} nodes", self.budget)));
            }
            let mut relax = |to: Node, step: u64, extra_ops: u32, mv: Move| {
                let c = cost + step;
                if self.upper.is_some_and(|ub| c > ub) {
                    return;
                }
                let key = (c, ops + extra_ops);
                match dist.entry(to) {
                    Entry::Occupied(mut e) => {
                        if key >= *e.get() {
                            return;
                        }
                        e.insert(key);
                    }
                    Entry::Vacant(e) => {
                        e.insert(key);
                    }
                }
                parent.insert(to, ((q, mask), mv));
                heap.push(Reverse((key.0, key.1, to.0, to.1)));
            };

            let k = self.nfa.alphabet().len();
            if let Some(beta) = self.weights.beta {
                for a in 0..k {
                    for &t in self.nfa.successors(q, a) {
                        relax((t, mask), beta, 1, Move::Insert(a));
                    }
                }
            }
            let pending = full & !mask;
            if self.extend && (pending == 0 || transpose) {
                let jumps = pending.count_ones() as u64;
                for a in 0..k {
                    for &t in self.nfa.successors(q, a) {
                        relax((t, mask), delta * jumps, jumps as u32, Move::Extend(a));
                    }
                }
            }
            let mut skipped = 0u64;
            for j in 0..n {
                let bit = 1u128 << j;
                if mask & bit != 0 {
                    continue;
                }
                if let Some(gamma) = self.weights.gamma {
                    relax((q, mask | bit), gamma, 1, Move::Delete(j));
                }
                let shift = delta * skipped;
                for a in 0..k {
                    let same = self.word[j] == Some(a);
                    let step = if same {
                        shift
                    } else if let Some(alpha) = self.weights.alpha {
                        shift + alpha
                    } else {
                        continue;
                    };
                    let extra = skipped as u32 + u32::from(!same);
                    for &t in self.nfa.successors(q, a) {
                        relax((t, mask | bit), step, extra, Move::Place(j, a));
                    }
                }
                if !transpose {
                    break;
                }
                skipped += 1;
            }
        }
        Ok(None)
    }

    fn path(&self, parent: &HashMap<Node, (Node, Move)>, mut at: Node) -> Vec<Move> {
        let mut moves = Vec::new();
        while let Some(&(prev, mv)) = parent.get(&at) {
            moves.push(mv);
            at = prev;
        }
        moves.reverse();
        moves
    }
}
