//! Elementary constraints over named variables.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A decision variable: a position of the sequence or an auxiliary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Var {
    /// 1-based position in the constrained sequence.
    X(usize),
    Aux(&'static str, Vec<usize>),
}

impl Var {
    pub fn aux(family: &'static str, index: &[usize]) -> Var {
        Var::Aux(family, index.to_vec())
    }

    pub fn is_aux(&self) -> bool {
        matches!(self, Var::Aux(..))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "X{i}"),
            Var::Aux(name, idx) => {
                let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                write!(f, "{name}[{}]", idx.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Var(Var),
    Const(i64),
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Const(c) => c.fmt(f),
        }
    }
}

pub type Valuation = BTreeMap<Var, i64>;
pub type Substitution = BTreeMap<Var, Term>;

fn value(t: &Term, v: &Valuation) -> Result<i64> {
    match t {
        Term::Const(c) => Ok(*c),
        Term::Var(x) => v.get(x).copied().ok_or_else(|| Error::input(format!("{x} has no value"))),
    }
}

fn subst(t: &Term, theta: &Substitution) -> Term {
    match t {
        Term::Var(x) => theta.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) => t.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// 0 when satisfied, 1 otherwise.
    Binary,
    /// Distance to the feasible interval for linear constraints; binary
    /// for the others.
    Amount,
}

/// An elementary constraint. Constructors canonicalize, so structurally
/// equal constraints compare equal and merge in weighted sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Elementary {
    Neq(Term, Term),
    /// `lo <= sum c_i * v_i <= hi`, terms sorted by variable, no zero
    /// coefficients.
    Linear { terms: Vec<(Var, i64)>, lo: Option<i64>, hi: Option<i64> },
    /// `indicator = 1` iff `lo <= var <= hi`.
    Reified { indicator: Term, var: Term, lo: i64, hi: i64 },
    /// Local contiguity link over
    /// `(X[i-1], R[i-1], L[i], X[i], R[i], L[i+1], X[i+1])`.
    Contig([Term; 7]),
}

impl Elementary {
    pub fn neq(a: impl Into<Term>, b: impl Into<Term>) -> Elementary {
        let (a, b) = (a.into(), b.into());
        if a <= b {
            Elementary::Neq(a, b)
        } else {
            Elementary::Neq(b, a)
        }
    }

    /// Builds `lo <= sum terms + constant <= hi`, folding constants into
    /// the bounds.
    pub fn linear(terms: Vec<(Term, i64)>, lo: Option<i64>, hi: Option<i64>) -> Elementary {
        let mut acc: BTreeMap<Var, i64> = BTreeMap::new();
        let mut constant = 0;
        for (t, c) in terms {
            match t {
                Term::Const(k) => constant += c * k,
                Term::Var(x) => *acc.entry(x).or_insert(0) += c,
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        Elementary::Linear { terms, lo: lo.map(|l| l - constant), hi: hi.map(|h| h - constant) }
    }

    /// `a >= b`.
    pub fn ge(a: impl Into<Term>, b: impl Into<Term>) -> Elementary {
        Elementary::linear(vec![(a.into(), 1), (b.into(), -1)], Some(0), None)
    }

    pub fn reified(indicator: impl Into<Term>, var: impl Into<Term>, lo: i64, hi: i64) -> Elementary {
        Elementary::Reified { indicator: indicator.into(), var: var.into(), lo, hi }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        let mut push = |t: &Term| {
            if let Term::Var(x) = t {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
        };
        match self {
            Elementary::Neq(a, b) => {
                push(a);
                push(b);
            }
            Elementary::Linear { terms, .. } => {
                for (x, _) in terms {
                    push(&Term::Var(x.clone()));
                }
            }
            Elementary::Reified { indicator, var, .. } => {
                push(indicator);
                push(var);
            }
            Elementary::Contig(ts) => ts.iter().for_each(&mut push),
        }
        out
    }

    pub fn substitute(&self, theta: &Substitution) -> Elementary {
        match self {
            Elementary::Neq(a, b) => Elementary::neq(subst(a, theta), subst(b, theta)),
            Elementary::Linear { terms, lo, hi } => Elementary::linear(
                terms.iter().map(|(x, c)| (subst(&Term::Var(x.clone()), theta), *c)).collect(),
                *lo,
                *hi,
            ),
            Elementary::Reified { indicator, var, lo, hi } => {
                Elementary::reified(subst(indicator, theta), subst(var, theta), *lo, *hi)
            }
            Elementary::Contig(ts) => Elementary::Contig(ts.clone().map(|t| subst(&t, theta))),
        }
    }

    pub fn holds(&self, v: &Valuation) -> Result<bool> {
        Ok(self.error(v, ErrorKind::Binary)? == 0)
    }

    pub fn error(&self, v: &Valuation, kind: ErrorKind) -> Result<i64> {
        let bit = |b: bool| if b { 0 } else { 1 };
        Ok(match self {
            Elementary::Neq(a, b) => bit(value(a, v)? != value(b, v)?),
            Elementary::Linear { terms, lo, hi } => {
                let mut s = 0;
                for (x, c) in terms {
                    s += c * value(&Term::Var(x.clone()), v)?;
                }
                let below = lo.map_or(0, |l| (l - s).max(0));
                let above = hi.map_or(0, |h| (s - h).max(0));
                match kind {
                    ErrorKind::Binary => bit(below == 0 && above == 0),
                    ErrorKind::Amount => below + above,
                }
            }
            Elementary::Reified { indicator, var, lo, hi } => {
                let x = value(var, v)?;
                let inside = *lo <= x && x <= *hi;
                bit(value(indicator, v)? == i64::from(inside))
            }
            Elementary::Contig(ts) => {
                let mut t = [0i64; 7];
                for (slot, term) in t.iter_mut().zip(ts) {
                    *slot = value(term, v)?;
                }
                let [xp, rp, l, x, r, ln, xn] = t;
                let or = |a: i64, b: i64| i64::from(a != 0 || b != 0);
                bit(l >= xp && r >= xn && ln == or(l, x) && rp == or(r, x) && !(x == 0 && l == 1 && r == 1))
            }
        })
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elementary::Neq(a, b) => write!(f, "{a} != {b}"),
            Elementary::Linear { terms, lo, hi } => {
                let mut expr = String::new();
                for (k, (x, c)) in terms.iter().enumerate() {
                    let sign = if *c < 0 { "-" } else { "+" };
                    if k == 0 {
                        if *c < 0 {
                            expr.push('-');
                        }
                    } else {
                        expr.push_str(&format!(" {sign} "));
                    }
                    if c.abs() != 1 {
                        expr.push_str(&format!("{}*", c.abs()));
                    }
                    expr.push_str(&x.to_string());
                }
                if expr.is_empty() {
                    expr.push('0');
                }
                match (lo, hi) {
                    (Some(l), Some(h)) if l == h => write!(f, "{expr} = {l}"),
                    (Some(l), Some(h)) => write!(f, "{l} <= {expr} <= {h}"),
                    (Some(l), None) => write!(f, "{expr} >= {l}"),
                    (None, Some(h)) => write!(f, "{expr} <= {h}"),
                    (None, None) => write!(f, "{expr} free"),
                }
            }
            Elementary::Reified { indicator, var, lo, hi } => write!(f, "{indicator} = 1 <-> {var} in [{lo},{hi}]"),
            Elementary::Contig(ts) => {
                let ts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "contig({})", ts.join(","))
            }
        }
    }
}

impl std::str::FromStr for ErrorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(ErrorKind::Binary),
            "amount" => Ok(ErrorKind::Amount),
            _ => Err(Error::input(format!("unknown error function `{s}`"))),
        }
    }
}
