//! Bounded contractibility checks.

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize, Serializer};

use super::{ConstraintDef, Relation};
use crate::error::Result;
use crate::oracle::{words_up_to, ClosureVerdict};
use crate::symbol::{Symbol, Word};

/// Rationals extended with both infinities.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtReal {
    NegInf,
    Finite(Rational64),
    PosInf,
}

impl ExtReal {
    pub fn int(v: i64) -> Self {
        ExtReal::Finite(Rational64::from_integer(v))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("inf"),
            ExtReal::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            ExtReal::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub type Accumulator = Arc<dyn Fn(&[Symbol]) -> Result<ExtReal> + Send + Sync>;

/// A constraint of the form `f(X) rel bound`.
#[derive(Clone)]
pub struct AccumulationSpec {
    pub f: Accumulator,
    pub relation: Relation,
    pub bound: ExtReal,
}

impl AccumulationSpec {
    pub fn new(
        f: impl Fn(&[Symbol]) -> Result<ExtReal> + Send + Sync + 'static,
        relation: Relation,
        bound: ExtReal,
    ) -> Self {
        AccumulationSpec { f: Arc::new(f), relation, bound }
    }

    pub fn to_constraint(&self, static_type: Vec<Symbol>) -> ConstraintDef {
        let spec = self.clone();
        let name = format!("f {} {}", self.relation, self.bound);
        ConstraintDef::new(name, static_type, false, move |w| Ok(spec.relation.holds((spec.f)(w)?, spec.bound)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Constant,
    NonDecreasing,
    NonIncreasing,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccumulationReport {
    pub shape: Shape,
    /// Whether `f rel z` is contractible for every `z`.
    pub contractible: bool,
    /// A pair `(w, w y)` where `f` moves in the wrong direction.
    pub witness: Option<(Word, Word)>,
    /// Prefix-closure check of the concrete constraint with the given bound.
    pub instance: ClosureVerdictReport,
    pub checked_up_to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClosureVerdictReport {
    Holds,
    Fails { member: Word, reduced: Word },
}

impl From<ClosureVerdict> for ClosureVerdictReport {
    fn from(v: ClosureVerdict) -> Self {
        match v {
            ClosureVerdict::Holds => ClosureVerdictReport::Holds,
            ClosureVerdict::Fails { member, reduced } => ClosureVerdictReport::Fails { member, reduced },
        }
    }
}

/// `f <= z` is contractible for all `z` iff `f` never decreases along
/// extensions, `f >= z` iff it never increases, and `f = z` iff it is
/// constant. The shape of `f` is determined on all words up to `max_len`.
pub fn classify_accumulation(
    spec: &AccumulationSpec,
    alphabet: &[Symbol],
    max_len: usize,
) -> Result<AccumulationReport> {
    let mut drop: Option<(Word, Word)> = None;
    let mut rise: Option<(Word, Word)> = None;
    for w in words_up_to(alphabet, max_len.saturating_sub(1)) {
        let fw = (spec.f)(&w)?;
        for a in alphabet {
            let mut v = w.clone();
            v.push(a.clone());
            let fv = (spec.f)(&v)?;
            if fv < fw && drop.is_none() {
                drop = Some((w.clone(), v.clone()));
            }
            if fv > fw && rise.is_none() {
                rise = Some((w.clone(), v));
            }
        }
        if drop.is_some() && rise.is_some() {
            break;
        }
    }
    let shape = match (&drop, &rise) {
        (None, None) => Shape::Constant,
        (None, Some(_)) => Shape::NonDecreasing,
        (Some(_), None) => Shape::NonIncreasing,
        (Some(_), Some(_)) => Shape::Neither,
    };
    let witness = match spec.relation {
        Relation::Le => drop,
        Relation::Ge => rise,
        Relation::Eq => drop.or(rise),
    };
    let c = spec.to_constraint(alphabet.to_vec());
    let instance = contractibility_oracle(&c, alphabet, max_len, Direction::Prefix).into();
    Ok(AccumulationReport { shape, contractible: witness.is_none(), witness, instance, checked_up_to: max_len })
}

/// Which sub-words of a solution must again be solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Prefix,
    Suffix,
    Subword,
    Subsequence,
}

impl std::str::FromStr for Direction {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(Direction::Prefix),
            "suffix" => Ok(Direction::Suffix),
            "subword" => Ok(Direction::Subword),
            "subsequence" => Ok(Direction::Subsequence),
            _ => Err(crate::error::Error::input(format!("unknown direction `{s}`"))),
        }
    }
}

fn reductions(w: &[Symbol], direction: Direction) -> Vec<Word> {
    let n = w.len();
    match direction {
        Direction::Prefix => vec![w[..n - 1].to_vec()],
        Direction::Suffix => vec![w[1..].to_vec()],
        Direction::Subword => vec![w[..n - 1].to_vec(), w[1..].to_vec()],
        Direction::Subsequence => (0..n)
            .map(|i| {
                let mut v = w.to_vec();
                v.remove(i);
                v
            })
            .collect(),
    }
}

/// Up to `limit` pairs `(member, reduced)` where the reduced word is not a
/// solution, in shortlex order of the member.
pub fn contractibility_counterexamples(
    c: &ConstraintDef,
    alphabet: &[Symbol],
    max_len: usize,
    direction: Direction,
    limit: usize,
) -> Vec<(Word, Word)> {
    let mut out = Vec::new();
    for w in words_up_to(alphabet, max_len) {
        if w.is_empty() || !c.contains(&w) {
            continue;
        }
        for r in reductions(&w, direction) {
            if !c.contains(&r) {
                out.push((w.clone(), r));
                if out.len() >= limit {
                    return out;
                }
            }
        }
    }
    out
}

/// Checks closure of the solution language under the given direction, on
/// all words up to `max_len`.
pub fn contractibility_oracle(
    c: &ConstraintDef,
    alphabet: &[Symbol],
    max_len: usize,
    direction: Direction,
) -> ClosureVerdict {
    match contractibility_counterexamples(c, alphabet, max_len, direction, 1).pop() {
        None => ClosureVerdict::Holds,
        Some((member, reduced)) => ClosureVerdict::Fails { member, reduced },
    }
}
