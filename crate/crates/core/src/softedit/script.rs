//! Edit scripts and their normal form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::EditWeights;
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::symbol::{Symbol, Word};

/// One edit. Positions are 1-based and refer to the word as it stands when
/// the operation is applied. `Insert` puts the symbol before `pos`
/// (`pos = len + 1` appends) and `Transpose` swaps `pos` and `pos + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Delete { pos: usize },
    Transpose { pos: usize },
    Substitute { pos: usize, symbol: Symbol },
    Insert { pos: usize, symbol: Symbol },
}

impl EditOp {
    fn rank(&self) -> u8 {
        match self {
            EditOp::Delete { .. } => 0,
            EditOp::Transpose { .. } => 1,
            EditOp::Substitute { .. } => 2,
            EditOp::Insert { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OpCounts {
    pub substitutions: u64,
    pub insertions: u64,
    pub deletions: u64,
    pub transpositions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub source: Word,
    pub ops: Vec<EditOp>,
}

impl EditScript {
    pub fn empty(source: &[Symbol]) -> Self {
        EditScript { source: source.to_vec(), ops: Vec::new() }
    }

    /// Replays the script on its source word.
    pub fn apply(&self) -> Result<Word> {
        let mut w = self.source.clone();
        for op in &self.ops {
            apply_op(&mut w, op, |v: &mut Vec<Symbol>, i, s| v.insert(i, s), |s| s.clone())?;
        }
        Ok(w)
    }

    pub fn counts(&self) -> OpCounts {
        let mut c = OpCounts::default();
        for op in &self.ops {
            match op {
                EditOp::Substitute { .. } => c.substitutions += 1,
                EditOp::Insert { .. } => c.insertions += 1,
                EditOp::Delete { .. } => c.deletions += 1,
                EditOp::Transpose { .. } => c.transpositions += 1,
            }
        }
        c
    }

    pub fn cost(&self, weights: &EditWeights) -> Cost {
        let c = self.counts();
        weights.alpha.times(c.substitutions)
            + weights.beta.times(c.insertions)
            + weights.gamma.times(c.deletions)
            + weights.delta.times(c.transpositions)
    }

    /// Deletions, then transpositions, then substitutions, then insertions,
    /// with no position substituted twice.
    pub fn is_normal_form(&self) -> bool {
        let ordered = self.ops.windows(2).all(|p| p[0].rank() <= p[1].rank());
        let mut substituted = BTreeSet::new();
        let distinct = self.ops.iter().all(|op| match op {
            EditOp::Substitute { pos, .. } => substituted.insert(*pos),
            _ => true,
        });
        ordered && distinct
    }

    /// Rewrites the script into normal form without raising its cost. When
    /// `beta + gamma <= 2 delta`, it also ensures that no letter takes part
    /// in more than one edit.
    pub fn normalize(&self, weights: &EditWeights) -> Result<EditScript> {
        let mut alignment = Alignment::track(self)?;
        if weights.beta + weights.gamma <= weights.delta.times(2) {
            alignment.separate_edits(weights);
        }
        Ok(alignment.to_script())
    }
}

fn apply_op<T: Clone>(
    w: &mut Vec<T>,
    op: &EditOp,
    insert: impl Fn(&mut Vec<T>, usize, T),
    make: impl Fn(&Symbol) -> T,
) -> Result<()> {
    let len = w.len();
    let bad = |pos: usize| Error::input(format!("edit position {pos} out of range for length {len}"));
    match op {
        EditOp::Substitute { pos, symbol } => {
            if *pos == 0 || *pos > len {
                return Err(bad(*pos));
            }
            w[pos - 1] = make(symbol);
        }
        EditOp::Insert { pos, symbol } => {
            if *pos == 0 || *pos > len + 1 {
                return Err(bad(*pos));
            }
            insert(w, pos - 1, make(symbol));
        }
        EditOp::Delete { pos } => {
            if *pos == 0 || *pos > len {
                return Err(bad(*pos));
            }
            w.remove(pos - 1);
        }
        EditOp::Transpose { pos } => {
            if *pos == 0 || *pos >= len {
                return Err(bad(*pos));
            }
            w.swap(pos - 1, *pos);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Slot {
    Kept { origin: usize, symbol: Symbol },
    Inserted(Symbol),
}

/// Where each letter of the result came from. Source letters that do not
/// appear were deleted.
#[derive(Debug, Clone)]
pub(crate) struct Alignment {
    pub source: Word,
    pub slots: Vec<Slot>,
}

impl Alignment {
    fn track(script: &EditScript) -> Result<Alignment> {
        #[derive(Clone)]
        struct Tagged(Option<usize>, Symbol);
        let mut w: Vec<Tagged> =
            script.source.iter().enumerate().map(|(i, s)| Tagged(Some(i), s.clone())).collect();
        for op in &script.ops {
            if let EditOp::Substitute { pos, symbol } = op {
                // substitution keeps the letter's origin
                if *pos >= 1 && *pos <= w.len() {
                    w[pos - 1].1 = symbol.clone();
                    continue;
                }
            }
            apply_op(&mut w, op, |v, i, t| v.insert(i, t), |s| Tagged(None, s.clone()))?;
        }
        let slots = w
            .into_iter()
            .map(|Tagged(origin, symbol)| match origin {
                Some(origin) => Slot::Kept { origin, symbol },
                None => Slot::Inserted(symbol),
            })
            .collect();
        Ok(Alignment { source: script.source.clone(), slots })
    }

    fn kept(&self) -> Vec<(usize, usize)> {
        // (slot index, origin)
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Slot::Kept { origin, .. } => Some((i, *origin)),
                Slot::Inserted(_) => None,
            })
            .collect()
    }

    fn substituted(&self, slot: usize) -> bool {
        matches!(&self.slots[slot], Slot::Kept { origin, symbol } if *symbol != self.source[*origin])
    }

    /// Applies the rewrites that stop a letter from being both moved and
    /// otherwise edited, until none applies. Each step either drops a kept
    /// letter or removes an inversion, so this terminates.
    fn separate_edits(&mut self, weights: &EditWeights) {
        loop {
            let kept = self.kept();
            let mut target = None;
            for (a, &(slot, origin)) in kept.iter().enumerate() {
                let partners: Vec<usize> = kept
                    .iter()
                    .enumerate()
                    .filter(|&(b, &(_, o))| (b < a && o > origin) || (b > a && o < origin))
                    .map(|(b, _)| b)
                    .collect();
                if partners.len() >= 2 || (partners.len() == 1 && self.substituted(slot)) {
                    target = Some((slot, partners.first().map(|&b| kept[b].0)));
                    break;
                }
            }
            let Some((slot, partner)) = target else { return };
            let symbol = match &self.slots[slot] {
                Slot::Kept { symbol, .. } => symbol.clone(),
                Slot::Inserted(_) => unreachable!(),
            };
            let single_swap = partner.filter(|_| self.kept_inversions(slot) == 1);
            match single_swap {
                Some(other) if weights.alpha <= weights.delta => {
                    // keep both letters in place and substitute instead
                    let (Slot::Kept { origin: o1, .. }, Slot::Kept { origin: o2, .. }) =
                        (self.slots[slot].clone(), self.slots[other].clone())
                    else {
                        unreachable!()
                    };
                    if let Slot::Kept { origin, .. } = &mut self.slots[slot] {
                        *origin = o2;
                    }
                    if let Slot::Kept { origin, .. } = &mut self.slots[other] {
                        *origin = o1;
                    }
                }
                _ => self.slots[slot] = Slot::Inserted(symbol),
            }
        }
    }

    fn kept_inversions(&self, slot: usize) -> usize {
        let kept = self.kept();
        let Some(a) = kept.iter().position(|&(s, _)| s == slot) else { return 0 };
        let origin = kept[a].1;
        kept.iter()
            .enumerate()
            .filter(|&(b, &(_, o))| (b < a && o > origin) || (b > a && o < origin))
            .count()
    }

    /// The cheapest normal-form script realizing this alignment.
    pub fn to_script(&self) -> EditScript {
        let mut ops = Vec::new();
        let kept: Vec<usize> = self.kept().into_iter().map(|(_, o)| o).collect();
        let survivors: BTreeSet<usize> = kept.iter().copied().collect();
        for j in (0..self.source.len()).rev() {
            if !survivors.contains(&j) {
                ops.push(EditOp::Delete { pos: j + 1 });
            }
        }
        let mut current: Vec<usize> = survivors.iter().copied().collect();
        for (t, &want) in kept.iter().enumerate() {
            let p = current.iter().position(|&o| o == want).unwrap();
            for s in (t..p).rev() {
                ops.push(EditOp::Transpose { pos: s + 1 });
                current.swap(s, s + 1);
            }
        }
        let mut t = 0;
        for slot in &self.slots {
            if let Slot::Kept { origin, symbol } = slot {
                t += 1;
                if *symbol != self.source[*origin] {
                    ops.push(EditOp::Substitute { pos: t, symbol: symbol.clone() });
                }
            }
        }
        for (k, slot) in self.slots.iter().enumerate() {
            if let Slot::Inserted(symbol) = slot {
                ops.push(EditOp::Insert { pos: k + 1, symbol: symbol.clone() });
            }
        }
        EditScript { source: self.source.clone(), ops }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::word;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    #[test]
    fn positions_are_one_based() {
        let s = EditScript {
            source: word("abc"),
            ops: vec![
                EditOp::Transpose { pos: 2 },
                EditOp::Insert { pos: 4, symbol: sym("d") },
                EditOp::Substitute { pos: 1, symbol: sym("x") },
                EditOp::Delete { pos: 2 },
            ],
        };
        assert_eq!(s.apply().unwrap(), word("xbd"));
        let bad = EditScript { source: word("ab"), ops: vec![EditOp::Transpose { pos: 2 }] };
        assert!(bad.apply().is_err());
    }

    #[test]
    fn insert_and_delete_commute_into_normal_form() {
        let s = EditScript {
            source: word("abc"),
            ops: vec![EditOp::Insert { pos: 1, symbol: sym("x") }, EditOp::Delete { pos: 4 }],
        };
        let w = EditWeights::uniform(Cost::ONE);
        let n = s.normalize(&w).unwrap();
        assert!(n.is_normal_form());
        assert_eq!(n.apply().unwrap(), s.apply().unwrap());
        assert_eq!(n.cost(&w), s.cost(&w));
        assert!(matches!(n.ops[0], EditOp::Delete { .. }));
    }

    #[test]
    fn double_substitution_collapses() {
        let s = EditScript {
            source: word("a"),
            ops: vec![
                EditOp::Substitute { pos: 1, symbol: sym("b") },
                EditOp::Substitute { pos: 1, symbol: sym("c") },
            ],
        };
        let w = EditWeights::uniform(Cost::ONE);
        let n = s.normalize(&w).unwrap();
        assert_eq!(n.ops.len(), 1);
        assert!(n.cost(&w) < s.cost(&w));
    }

    #[test]
    fn long_moves_become_delete_insert() {
        // move `a` three places right: cost 3 delta
        let s = EditScript {
            source: word("abcd"),
            ops: (1..=3).map(|pos| EditOp::Transpose { pos }).collect(),
        };
        let w = EditWeights::new(Cost::int(5), Cost::ONE, Cost::ONE, Cost::ONE);
        let n = s.normalize(&w).unwrap();
        assert_eq!(n.apply().unwrap(), word("bcda"));
        assert_eq!(n.counts().transpositions, 0);
        assert!(n.cost(&w) <= s.cost(&w));
    }
}
