//! Violation measures built from decompositions into weighted sets of
//! elementary constraints.

mod analysis;
mod elementary;
mod family;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::error::{Error, Result};

pub use analysis::{
    covering_check, natural_embedding, semantic_embedding_check, Covering, Embedding, EmbeddingVerdict,
    DEFAULT_COVERING_BUDGET,
};
pub use elementary::{Elementary, ErrorKind, Substitution, Term, Valuation, Var};
pub use family::{
    decompose, drop_lower_bounds, violation, weaken, AuxStrategy, AuxType, DecompKind, DecompParams, Decomposition,
    Family, Selector,
};

/// A finite map from items to non-negative weights. Items never inserted
/// have weight 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSet<T: Ord> {
    items: BTreeMap<T, Cost>,
}

impl<T: Ord> Default for WeightedSet<T> {
    fn default() -> Self {
        WeightedSet { items: BTreeMap::new() }
    }
}

impl<T: Ord + Clone> WeightedSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `w` to the weight of `item`.
    pub fn insert(&mut self, item: T, w: Cost) {
        let slot = self.items.entry(item).or_insert(Cost::ZERO);
        *slot = *slot + w;
    }

    pub fn weight(&self, item: &T) -> Cost {
        self.items.get(item).copied().unwrap_or(Cost::ZERO)
    }

    pub fn contains(&self, item: &T) -> bool {
        self.items.contains_key(item)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Cost)> {
        self.items.iter()
    }

    pub fn items(&self) -> impl Iterator<Item = &T> {
        self.items.keys()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// No member carries weight 0.
    pub fn is_proper(&self) -> bool {
        self.items.values().all(|w| !w.is_zero())
    }

    /// Every member has at most the weight it has in `other`.
    pub fn is_sub_of(&self, other: &WeightedSet<T>) -> bool {
        self.items.iter().all(|(s, w)| *w <= other.weight(s))
    }

    /// Pointwise sum of weights.
    pub fn union(&self, other: &WeightedSet<T>) -> WeightedSet<T> {
        let mut out = self.clone();
        for (s, w) in other.iter() {
            out.insert(s.clone(), *w);
        }
        out
    }

    /// Image under `f`; items with equal images merge and their weights add.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> WeightedSet<U> {
        let mut out = WeightedSet::new();
        for (s, w) in self.iter() {
            out.insert(f(s), *w);
        }
        out
    }

    pub fn retain(&mut self, f: impl Fn(&T, &Cost) -> bool) {
        self.items.retain(|s, w| f(s, w));
    }
}

impl<T: Ord + Clone> FromIterator<(T, Cost)> for WeightedSet<T> {
    fn from_iter<I: IntoIterator<Item = (T, Cost)>>(iter: I) -> Self {
        let mut out = WeightedSet::new();
        for (s, w) in iter {
            out.insert(s, w);
        }
        out
    }
}

/// Error values of a weighted constraint set under a valuation, with the
/// weights of constraints sharing an error value added up.
pub fn errors(
    set: &WeightedSet<Elementary>,
    v: &Valuation,
    kind: ErrorKind,
) -> Result<WeightedSet<i64>> {
    let mut out = WeightedSet::new();
    for (c, w) in set.iter() {
        out.insert(c.error(v, kind)?, *w);
    }
    Ok(out)
}

/// Aggregates a weighted set of error values into one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comb {
    Sum,
    /// Largest value of positive weight; weights are otherwise ignored.
    Max,
    CountNonzero,
    SumOfSquares,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CombFlags {
    pub monotonic: bool,
    pub disjunctive: bool,
    pub unit_zero: bool,
}

impl Comb {
    pub const ALL: [Comb; 4] = [Comb::Sum, Comb::Max, Comb::CountNonzero, Comb::SumOfSquares];

    pub fn apply(&self, errors: &WeightedSet<i64>) -> Cost {
        let nonzero = errors.iter().filter(|(v, w)| **v != 0 && !w.is_zero());
        match self {
            Comb::Sum => nonzero.map(|(v, w)| Cost::int(*v).mul(*w)).sum(),
            Comb::Max => nonzero.map(|(v, _)| Cost::int(*v)).max().unwrap_or(Cost::ZERO),
            Comb::CountNonzero => nonzero.map(|(_, w)| *w).sum(),
            Comb::SumOfSquares => nonzero.map(|(v, w)| Cost::int(v * v).mul(*w)).sum(),
        }
    }

    /// Declared properties; the test suite checks them on random inputs.
    pub fn flags(&self) -> CombFlags {
        CombFlags { monotonic: true, disjunctive: true, unit_zero: true }
    }
}

impl std::str::FromStr for Comb {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Comb::Sum),
            "max" => Ok(Comb::Max),
            "count" | "count_nonzero" => Ok(Comb::CountNonzero),
            "sum_of_squares" | "squares" => Ok(Comb::SumOfSquares),
            _ => Err(Error::input(format!("unknown combining function `{s}`"))),
        }
    }
}

impl fmt::Display for Comb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comb::Sum => "sum",
            Comb::Max => "max",
            Comb::CountNonzero => "count_nonzero",
            Comb::SumOfSquares => "sum_of_squares",
        })
    }
}
