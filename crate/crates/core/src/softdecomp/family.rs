//! Decomposition families and the measures they induce.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::elementary::{Elementary, ErrorKind, Term, Valuation, Var};
use super::{errors, Comb, WeightedSet};
use crate::algebra::{ints_of, CatalogSpec, ConstraintDef};
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

/// Keeps an elementary constraint when it returns true.
pub type Selector = Arc<dyn Fn(&Elementary) -> bool + Send + Sync>;

const ENUMERATION_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecompParams {
    /// Values range over `1..=d`.
    #[serde(default)]
    pub d: usize,
    #[serde(default)]
    pub lower: Vec<usize>,
    #[serde(default)]
    pub upper: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompKind {
    AlldiffDiseq { d: usize },
    AlldiffBounds { d: usize },
    ContiguitySlide,
    RisingSawtooth { d: usize },
    GccFull { d: usize, lower: Vec<usize>, upper: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxType {
    Finite(Vec<i64>),
    /// Non-negative integers.
    Nat,
}

impl AuxType {
    pub fn contains(&self, c: i64) -> bool {
        match self {
            AuxType::Finite(vs) => vs.contains(&c),
            AuxType::Nat => c >= 0,
        }
    }

    /// `self` is a subset of `other`.
    pub fn within(&self, other: &AuxType) -> bool {
        match (self, other) {
            (AuxType::Finite(a), _) => a.iter().all(|&c| other.contains(c)),
            (AuxType::Nat, AuxType::Nat) => true,
            (AuxType::Nat, AuxType::Finite(_)) => false,
        }
    }

    /// Values to range over, with `Nat` cut at `bound`.
    pub fn values(&self, bound: i64) -> Vec<i64> {
        match self {
            AuxType::Finite(vs) => vs.clone(),
            AuxType::Nat => (0..=bound).collect(),
        }
    }
}

/// How the minimum over auxiliary variables is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxStrategy {
    NoAux,
    /// Full enumeration of the finite auxiliary types.
    Enumerate,
    /// Auxiliaries are fixed as functions of the sequence.
    Functional,
}

/// A decomposition for every sequence length, possibly weakened.
#[derive(Clone)]
pub struct Family {
    pub kind: DecompKind,
    keep: Option<Selector>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family").field("kind", &self.kind).field("weakened", &self.keep.is_some()).finish()
    }
}

fn one() -> Cost {
    Cost::ONE
}

fn range(d: usize) -> Vec<i64> {
    (1..=d as i64).collect()
}

fn intervals(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in 1..=d {
        for u in l..=d {
            out.push((l, u));
        }
    }
    out
}

fn a_var(i: usize, l: usize, u: usize) -> Var {
    Var::aux("A", &[i, l, u])
}

fn n_var(l: usize, u: usize) -> Var {
    Var::aux("N", &[l, u])
}

fn sawtooth_items(n: usize, out: &mut Vec<Elementary>) {
    let x = |i: usize| Term::Var(Var::X(i));
    match n {
        0 | 1 => {}
        2 => out.push(Elementary::ge(x(1), x(2))),
        _ if n % 2 == 1 => {
            sawtooth_items(n - 1, out);
            out.push(Elementary::ge(x(n), x(n - 1)));
        }
        _ => {
            sawtooth_items(n - 2, out);
            out.push(Elementary::ge(x(n - 1), x(n)));
            out.push(Elementary::ge(x(n), x(n - 2)));
        }
    }
}

/// Even positions are non-decreasing and every odd position is at least
/// its neighbours (positions 1-based).
pub fn rising_sawtooth_holds(xs: &[i64]) -> bool {
    let evens_ok = xs.iter().skip(1).step_by(2).collect::<Vec<_>>().windows(2).all(|p| p[0] <= p[1]);
    let odds_ok = (0..xs.len()).step_by(2).all(|i| {
        (i == 0 || xs[i] >= xs[i - 1]) && (i + 1 >= xs.len() || xs[i] >= xs[i + 1])
    });
    evens_ok && odds_ok
}

/// Drops the lower halves of the count bounds `sum l_j <= N[l,u]`.
pub fn drop_lower_bounds() -> Selector {
    Arc::new(|c| match c {
        Elementary::Linear { terms, lo: Some(_), hi: None } => {
            !(terms.len() == 1 && matches!(&terms[0].0, Var::Aux("N", _)))
        }
        _ => true,
    })
}

impl Family {
    pub fn new(name: &str, params: &DecompParams) -> Result<Family> {
        let need_d = || {
            if params.d == 0 {
                Err(Error::input(format!("{name} needs a positive value count d")))
            } else {
                Ok(params.d)
            }
        };
        let kind = match name {
            "alldiff_diseq" => DecompKind::AlldiffDiseq { d: need_d()? },
            "alldiff_bounds" => DecompKind::AlldiffBounds { d: need_d()? },
            "contiguity_slide" => DecompKind::ContiguitySlide,
            "rising_sawtooth" => DecompKind::RisingSawtooth { d: need_d()? },
            "gcc_full" => {
                let d = need_d()?;
                if params.lower.len() != d || params.upper.len() != d {
                    return Err(Error::input("gcc_full needs d lower and d upper bounds"));
                }
                DecompKind::GccFull { d, lower: params.lower.clone(), upper: params.upper.clone() }
            }
            _ => return Err(Error::input(format!("unknown decomposition `{name}`"))),
        };
        Ok(Family { kind, keep: None })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DecompKind::AlldiffDiseq { .. } => "alldiff_diseq",
            DecompKind::AlldiffBounds { .. } => "alldiff_bounds",
            DecompKind::ContiguitySlide => "contiguity_slide",
            DecompKind::RisingSawtooth { .. } => "rising_sawtooth",
            DecompKind::GccFull { .. } => "gcc_full",
        }
    }

    pub fn x_type(&self) -> Vec<i64> {
        match &self.kind {
            DecompKind::ContiguitySlide => vec![0, 1],
            DecompKind::AlldiffDiseq { d }
            | DecompKind::AlldiffBounds { d }
            | DecompKind::RisingSawtooth { d }
            | DecompKind::GccFull { d, .. } => range(*d),
        }
    }

    pub fn alphabet(&self) -> Vec<Symbol> {
        self.x_type().into_iter().map(Symbol::int).collect()
    }

    pub fn strategy(&self) -> AuxStrategy {
        match self.kind {
            DecompKind::AlldiffDiseq { .. } | DecompKind::RisingSawtooth { .. } => AuxStrategy::NoAux,
            DecompKind::ContiguitySlide => AuxStrategy::Enumerate,
            DecompKind::AlldiffBounds { .. } | DecompKind::GccFull { .. } => AuxStrategy::Functional,
        }
    }

    pub fn is_weakened(&self) -> bool {
        self.keep.is_some()
    }

    /// Restricts every instance to the constraints `keep` accepts.
    pub fn weaken(&self, keep: Selector) -> Family {
        let keep = match &self.keep {
            None => keep,
            Some(old) => {
                let old = old.clone();
                Arc::new(move |c: &Elementary| old(c) && keep(c))
            }
        };
        Family { kind: self.kind.clone(), keep: Some(keep) }
    }

    /// The hard constraint the family decomposes.
    pub fn constraint(&self) -> Result<ConstraintDef> {
        let ty: Vec<Symbol> = self.alphabet();
        match &self.kind {
            DecompKind::AlldiffDiseq { .. } | DecompKind::AlldiffBounds { .. } => {
                CatalogSpec::Alldifferent { ty }.to_def(None)
            }
            DecompKind::ContiguitySlide => CatalogSpec::Contiguity { ty }.to_def(None),
            DecompKind::GccFull { lower, upper, .. } => {
                let values = ty.clone();
                CatalogSpec::Gcc { values, lower: lower.clone(), upper: upper.clone(), ty }.to_def(None)
            }
            DecompKind::RisingSawtooth { .. } => {
                Ok(ConstraintDef::new("rising_sawtooth", ty, false, |w| Ok(rising_sawtooth_holds(&ints_of(w)?))))
            }
        }
    }

    pub fn at(&self, n: usize) -> Decomposition {
        let mut aux: BTreeMap<Var, AuxType> = BTreeMap::new();
        let mut items: Vec<Elementary> = Vec::new();
        let x = |i: usize| Term::Var(Var::X(i));
        let bits = || AuxType::Finite(vec![0, 1]);
        match &self.kind {
            DecompKind::AlldiffDiseq { .. } => {
                for i in 1..=n {
                    for j in i + 1..=n {
                        items.push(Elementary::neq(x(i), x(j)));
                    }
                }
            }
            DecompKind::AlldiffBounds { d } => {
                for (l, u) in intervals(*d) {
                    for i in 1..=n {
                        aux.insert(a_var(i, l, u), bits());
                        items.push(Elementary::reified(a_var(i, l, u), x(i), l as i64, u as i64));
                    }
                    let sum = (1..=n).map(|i| (Term::Var(a_var(i, l, u)), 1)).collect();
                    items.push(Elementary::linear(sum, None, Some((u - l + 1) as i64)));
                }
            }
            DecompKind::ContiguitySlide => {
                if n >= 3 {
                    for i in 2..=n {
                        aux.insert(Var::aux("L", &[i]), bits());
                    }
                    for i in 1..n {
                        aux.insert(Var::aux("R", &[i]), bits());
                    }
                    let l = |i: usize| Term::Var(Var::aux("L", &[i]));
                    let r = |i: usize| Term::Var(Var::aux("R", &[i]));
                    for i in 2..n {
                        items.push(Elementary::Contig([x(i - 1), r(i - 1), l(i), x(i), r(i), l(i + 1), x(i + 1)]));
                    }
                }
            }
            DecompKind::RisingSawtooth { .. } => sawtooth_items(n, &mut items),
            DecompKind::GccFull { d, lower, upper } => {
                for (l, u) in intervals(*d) {
                    aux.insert(n_var(l, u), AuxType::Nat);
                    for i in 1..=n {
                        aux.insert(a_var(i, l, u), bits());
                        items.push(Elementary::reified(a_var(i, l, u), x(i), l as i64, u as i64));
                    }
                    let mut sum = vec![(Term::Var(n_var(l, u)), 1)];
                    sum.extend((1..=n).map(|i| (Term::Var(a_var(i, l, u)), -1)));
                    items.push(Elementary::linear(sum, Some(0), Some(0)));
                }
                for u in 2..=*d {
                    for k in 1..u {
                        let parts =
                            vec![(Term::Var(n_var(1, u)), 1), (Term::Var(n_var(1, k)), -1), (Term::Var(n_var(k + 1, u)), -1)];
                        items.push(Elementary::linear(parts, Some(0), Some(0)));
                    }
                }
                for (l, u) in intervals(*d) {
                    let lo: usize = lower[l - 1..u].iter().sum();
                    let hi: usize = upper[l - 1..u].iter().sum();
                    let nlu = || vec![(Term::Var(n_var(l, u)), 1)];
                    if lo > 0 {
                        items.push(Elementary::linear(nlu(), Some(lo as i64), None));
                    }
                    items.push(Elementary::linear(nlu(), None, Some(hi as i64)));
                }
            }
        }
        let mut set = WeightedSet::new();
        for c in items {
            if self.keep.as_ref().is_none_or(|k| k(&c)) {
                set.insert(c, one());
            }
        }
        Decomposition { family: self.clone(), n, x_type: self.x_type(), aux, set }
    }

    /// Values of the auxiliaries as functions of the sequence.
    fn determine(&self, xs: &[i64]) -> Valuation {
        let mut v = Valuation::new();
        let d = match &self.kind {
            DecompKind::AlldiffBounds { d } | DecompKind::GccFull { d, .. } => *d,
            _ => return v,
        };
        let gcc = matches!(self.kind, DecompKind::GccFull { .. });
        for (l, u) in intervals(d) {
            let mut count = 0;
            for (i, &xi) in xs.iter().enumerate() {
                let inside = (l as i64) <= xi && xi <= u as i64;
                count += i64::from(inside);
                v.insert(a_var(i + 1, l, u), i64::from(inside));
            }
            if gcc {
                v.insert(n_var(l, u), count);
            }
        }
        v
    }

    /// The measure of a word, using the instance of matching length.
    pub fn measure(&self, comb: Comb, kind: ErrorKind, w: &[Symbol]) -> Result<Cost> {
        let xs = ints_of(w)?;
        self.at(xs.len()).violation(comb, kind, &xs)
    }
}

/// A decomposition instantiated at one sequence length.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub family: Family,
    pub n: usize,
    pub x_type: Vec<i64>,
    pub aux: BTreeMap<Var, AuxType>,
    pub set: WeightedSet<Elementary>,
}

impl Decomposition {
    /// Type of any variable of this instance.
    pub fn var_type(&self, v: &Var) -> Option<AuxType> {
        match v {
            Var::X(i) if (1..=self.n).contains(i) => Some(AuxType::Finite(self.x_type.clone())),
            Var::X(_) => None,
            Var::Aux(..) => self.aux.get(v).cloned(),
        }
    }

    fn base_valuation(&self, xs: &[i64]) -> Result<Valuation> {
        if xs.len() != self.n {
            return Err(Error::input(format!("expected {} values, got {}", self.n, xs.len())));
        }
        if let Some(x) = xs.iter().find(|x| !self.x_type.contains(x)) {
            return Err(Error::UnknownSymbol(x.to_string()));
        }
        Ok(xs.iter().enumerate().map(|(i, &x)| (Var::X(i + 1), x)).collect())
    }

    /// Minimum of the combined errors over the admissible extensions of
    /// `xs` to the auxiliary variables.
    pub fn violation(&self, comb: Comb, kind: ErrorKind, xs: &[i64]) -> Result<Cost> {
        let mut v = self.base_valuation(xs)?;
        match self.family.strategy() {
            AuxStrategy::NoAux => Ok(comb.apply(&errors(&self.set, &v, kind)?)),
            AuxStrategy::Functional => {
                v.extend(self.family.determine(xs));
                Ok(comb.apply(&errors(&self.set, &v, kind)?))
            }
            AuxStrategy::Enumerate => {
                let mut free: Vec<Var> = Vec::new();
                for c in self.set.items() {
                    for x in c.vars() {
                        if x.is_aux() && !free.contains(&x) {
                            free.push(x);
                        }
                    }
                }
                let mut domains = Vec::with_capacity(free.len());
                let mut total: u64 = 1;
                for x in &free {
                    match self.aux.get(x) {
                        Some(AuxType::Finite(vs)) => {
                            total = total.saturating_mul(vs.len() as u64);
                            domains.push(vs.clone());
                        }
                        _ => return Err(Error::input(format!("{x} has no finite type to enumerate"))),
                    }
                }
                if total > ENUMERATION_LIMIT {
                    return Err(Error::resource(format!("{total} auxiliary assignments to enumerate")));
                }
                let mut best = Cost::Infinite;
                let mut idx = vec![0usize; free.len()];
                loop {
                    for (k, x) in free.iter().enumerate() {
                        v.insert(x.clone(), domains[k][idx[k]]);
                    }
                    best = best.min(comb.apply(&errors(&self.set, &v, kind)?));
                    if best.is_zero() {
                        return Ok(best);
                    }
                    let mut k = 0;
                    while k < idx.len() && idx[k] + 1 == domains[k].len() {
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        return Ok(best);
                    }
                    idx[k] += 1;
                }
            }
        }
    }
}

pub fn decompose(name: &str, params: &DecompParams, n: usize) -> Result<Decomposition> {
    Ok(Family::new(name, params)?.at(n))
}

/// The same family restricted by `keep`, at the same length.
pub fn weaken(d: &Decomposition, keep: Selector) -> Decomposition {
    d.family.weaken(keep).at(d.n)
}

/// Measure of `xs` under the family of `d`, at the matching length.
pub fn violation(d: &Decomposition, comb: Comb, kind: ErrorKind, xs: &[i64]) -> Result<Cost> {
    if xs.len() == d.n {
        d.violation(comb, kind, xs)
    } else {
        d.family.at(xs.len()).violation(comb, kind, xs)
    }
}
