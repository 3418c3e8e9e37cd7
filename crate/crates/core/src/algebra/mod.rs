//! Constraints over variable sequences and their contractibility.

mod catalog;
mod classify;
mod meta;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use catalog::{peak_count, Approximation, AutomatonRef, CatalogSpec, GrammarRef};
pub use classify::{
    classify_accumulation, contractibility_counterexamples, contractibility_oracle, AccumulationReport,
    AccumulationSpec, Direction, ExtReal, Shape,
};
pub use meta::{and, exists_at, forall_at, not, or, slide, slide_eval, splash, splash_eval};

use crate::error::{Error, Result};
use crate::symbol::Symbol;

pub type Predicate = Arc<dyn Fn(&[Symbol]) -> Result<bool> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn holds<T: PartialOrd>(self, lhs: T, rhs: T) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// A constraint given by its set of solutions: a word is a solution when
/// every letter lies in the static type and the predicate accepts it.
#[derive(Clone)]
pub struct ConstraintDef {
    pub name: String,
    pub static_type: Vec<Symbol>,
    /// Invariant under permutations of the variables.
    pub order_free: bool,
    /// Only words of this length can be solutions.
    pub arity: Option<usize>,
    predicate: Predicate,
}

impl fmt::Debug for ConstraintDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintDef")
            .field("name", &self.name)
            .field("static_type", &self.static_type)
            .field("order_free", &self.order_free)
            .field("arity", &self.arity)
            .finish_non_exhaustive()
    }
}

impl ConstraintDef {
    pub fn new(
        name: impl Into<String>,
        static_type: Vec<Symbol>,
        order_free: bool,
        predicate: impl Fn(&[Symbol]) -> Result<bool> + Send + Sync + 'static,
    ) -> Self {
        ConstraintDef { name: name.into(), static_type, order_free, arity: None, predicate: Arc::new(predicate) }
    }

    pub fn with_arity(mut self, k: usize) -> Self {
        self.arity = Some(k);
        self
    }

    /// The constraint that holds for every word over the type.
    pub fn truth(static_type: Vec<Symbol>) -> Self {
        ConstraintDef::new("true", static_type, true, |_| Ok(true))
    }

    /// Evaluates the constraint; symbols outside the static type and
    /// words of the wrong arity are input errors.
    pub fn eval(&self, w: &[Symbol]) -> Result<bool> {
        if let Some(a) = w.iter().find(|a| !self.static_type.contains(a)) {
            return Err(Error::UnknownSymbol(a.to_string()));
        }
        if let Some(k) = self.arity {
            if w.len() != k {
                return Err(Error::input(format!("{} expects {k} variables, got {}", self.name, w.len())));
            }
        }
        (self.predicate)(w)
    }

    /// Membership in the solution language; anything `eval` rejects is
    /// simply not a member.
    pub fn contains(&self, w: &[Symbol]) -> bool {
        self.arity.is_none_or(|k| k == w.len())
            && w.iter().all(|a| self.static_type.contains(a))
            && (self.predicate)(w).unwrap_or(false)
    }

    pub fn type_set(&self) -> BTreeSet<Symbol> {
        self.static_type.iter().cloned().collect()
    }
}

pub fn int_of(a: &Symbol) -> Result<i64> {
    a.as_int().ok_or_else(|| Error::input(format!("`{a}` is not an integer value")))
}

pub fn ints_of(w: &[Symbol]) -> Result<Vec<i64>> {
    w.iter().map(int_of).collect()
}
