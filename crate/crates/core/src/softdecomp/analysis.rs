//! Covering and semantic embedding between consecutive instances.

use std::collections::BTreeSet;

use serde::Serialize;

use super::elementary::{Elementary, ErrorKind, Substitution, Term, Valuation, Var};
use super::family::{AuxType, Decomposition};
use super::{errors, Comb, WeightedSet};
use crate::error::{Error, Result};

pub const DEFAULT_COVERING_BUDGET: usize = 200_000;

const VALUATION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Covering {
    /// The substitution, listing only auxiliaries it moves or fixes.
    Covered { theta: Vec<(String, String)> },
    NotCovered,
    /// The search budget ran out first.
    Indeterminate,
}

impl Covering {
    pub fn is_covered(&self) -> bool {
        matches!(self, Covering::Covered { .. })
    }
}

fn apply(set: &WeightedSet<Elementary>, theta: &Substitution) -> WeightedSet<Elementary> {
    set.map(|c| c.substitute(theta))
}

struct CoverSearch<'a> {
    d2: &'a Decomposition,
    items: Vec<(Elementary, Vec<Var>)>,
    candidates: std::collections::BTreeMap<Var, Vec<Term>>,
    d1: &'a Decomposition,
    nodes: usize,
    budget: usize,
}

impl CoverSearch<'_> {
    fn run(&mut self, k: usize, theta: &mut Substitution) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if k == self.items.len() {
            return Some(apply(&self.d1.set, theta).is_sub_of(&self.d2.set));
        }
        let (item, vars) = self.items[k].clone();
        let open: Vec<Var> = vars.into_iter().filter(|x| !theta.contains_key(x)).collect();
        let mut idx = vec![0usize; open.len()];
        loop {
            for (j, x) in open.iter().enumerate() {
                theta.insert(x.clone(), self.candidates[x][idx[j]].clone());
            }
            if self.d2.set.contains(&item.substitute(theta)) {
                match self.run(k + 1, theta) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            let mut j = 0;
            while j < idx.len() && idx[j] + 1 == self.candidates[&open[j]].len() {
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
            idx[j] += 1;
        }
        for x in &open {
            theta.remove(x);
        }
        Some(false)
    }
}

/// Looks for a substitution, the identity on the sequence variables,
/// under which the first instance becomes a sub-weighted set of the
/// second. Auxiliaries may go to the same-named auxiliary of `d2` or to a
/// constant of the sequence type.
pub fn covering_check(d1: &Decomposition, d2: &Decomposition, budget: usize) -> Covering {
    if d1.x_type != d2.x_type || d1.n > d2.n {
        return Covering::NotCovered;
    }
    let mut candidates = std::collections::BTreeMap::new();
    let mut items: Vec<(Elementary, Vec<Var>)> = Vec::new();
    for c in d1.set.items() {
        let aux: Vec<Var> = c.vars().into_iter().filter(Var::is_aux).collect();
        for u in &aux {
            if candidates.contains_key(u) {
                continue;
            }
            let t1 = d1.var_type(u).unwrap_or(AuxType::Nat);
            let mut cands = Vec::new();
            if let Some(t2) = d2.var_type(u) {
                if t2.within(&t1) {
                    cands.push(Term::Var(u.clone()));
                }
            }
            cands.extend(d1.x_type.iter().filter(|&&c| t1.contains(c)).map(|&c| Term::Const(c)));
            candidates.insert(u.clone(), cands);
        }
        items.push((c.clone(), aux));
    }
    items.sort_by_key(|(_, vs)| vs.len());
    let mut search = CoverSearch { d2, items, candidates, d1, nodes: 0, budget };
    let mut theta = Substitution::new();
    match search.run(0, &mut theta) {
        Some(true) => Covering::Covered {
            theta: theta.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        },
        Some(false) => Covering::NotCovered,
        None => Covering::Indeterminate,
    }
}

/// A candidate embedding: `theta` on auxiliaries (unlisted ones map to
/// themselves) and, for every constraint of the substituted first
/// instance, its image as a group of constraints of the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub theta: Substitution,
    pub phi: Vec<(Elementary, Vec<Elementary>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EmbeddingVerdict {
    Holds,
    Fails { reason: String, valuation: Option<Vec<(String, i64)>> },
}

impl EmbeddingVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, EmbeddingVerdict::Holds)
    }

    fn fail(reason: impl Into<String>) -> Self {
        EmbeddingVerdict::Fails { reason: reason.into(), valuation: None }
    }
}

/// The name-preserving embedding: constraints present in both instances
/// map to themselves, a linear constraint whose sum grew maps to the grown
/// version, and `a >= b` missing from `d2` maps to a chain `a >= m, m >= b`.
pub fn natural_embedding(d1: &Decomposition, d2: &Decomposition) -> Result<Embedding> {
    let fresh: Vec<&Elementary> = d2.set.items().filter(|c| !d1.set.contains(c)).collect();
    let mut phi = Vec::new();
    for c in d1.set.items() {
        if d2.set.contains(c) {
            phi.push((c.clone(), vec![c.clone()]));
            continue;
        }
        if let Some(img) = grown(c, &fresh) {
            phi.push((c.clone(), vec![img]));
            continue;
        }
        if let Some(pair) = chain(c, &fresh) {
            phi.push((c.clone(), pair));
            continue;
        }
        return Err(Error::input(format!("no natural image for `{c}`")));
    }
    Ok(Embedding { theta: Substitution::new(), phi })
}

fn grown(c: &Elementary, fresh: &[&Elementary]) -> Option<Elementary> {
    let Elementary::Linear { terms, lo, hi } = c else { return None };
    fresh
        .iter()
        .find(|c2| match c2 {
            Elementary::Linear { terms: t2, lo: l2, hi: h2 } => {
                l2 == lo && h2 == hi && t2.len() > terms.len() && terms.iter().all(|t| t2.contains(t))
            }
            _ => false,
        })
        .map(|c2| (*c2).clone())
}

fn as_ge(c: &Elementary) -> Option<(Var, Var)> {
    match c {
        Elementary::Linear { terms, lo: Some(0), hi: None } if terms.len() == 2 => {
            let pos = terms.iter().find(|t| t.1 == 1)?;
            let neg = terms.iter().find(|t| t.1 == -1)?;
            Some((pos.0.clone(), neg.0.clone()))
        }
        _ => None,
    }
}

fn chain(c: &Elementary, fresh: &[&Elementary]) -> Option<Vec<Elementary>> {
    let (a, b) = as_ge(c)?;
    for first in fresh {
        let Some((a1, m)) = as_ge(first) else { continue };
        if a1 != a {
            continue;
        }
        let second = Elementary::ge(m, b.clone());
        if fresh.contains(&&second) {
            return Some(vec![(*first).clone(), second]);
        }
    }
    None
}

/// Checks the three embedding conditions. The inequality between errors
/// is verified on every valuation of the variables involved, with
/// unbounded integer types cut at `bound`.
pub fn semantic_embedding_check(
    d1: &Decomposition,
    d2: &Decomposition,
    emb: &Embedding,
    comb: Comb,
    kind: ErrorKind,
    bound: i64,
) -> Result<EmbeddingVerdict> {
    if d1.x_type != d2.x_type || d1.n > d2.n {
        return Ok(EmbeddingVerdict::fail("sequence variables differ"));
    }
    // the substitution
    let mut theta = emb.theta.clone();
    for (u, t1) in &d1.aux {
        let image = theta.entry(u.clone()).or_insert_with(|| Term::Var(u.clone())).clone();
        let ok = match &image {
            Term::Const(c) => t1.contains(*c),
            Term::Var(x) => d2.var_type(x).is_some_and(|t2| t2.within(t1)),
        };
        if !ok {
            return Ok(EmbeddingVerdict::fail(format!("{u} -> {image} breaks the type condition")));
        }
    }
    if let Some(x) = theta.iter().find_map(|(k, v)| (!k.is_aux() && *v != Term::Var(k.clone())).then_some(k)) {
        return Ok(EmbeddingVerdict::fail(format!("{x} is not mapped to itself")));
    }
    // the item map
    let s1 = apply(&d1.set, &theta);
    let domain: BTreeSet<&Elementary> = emb.phi.iter().map(|(c, _)| c).collect();
    if domain.len() != emb.phi.len() || !s1.items().all(|c| domain.contains(c)) || domain.len() != s1.len() {
        return Ok(EmbeddingVerdict::fail("the item map does not cover the substituted constraints exactly"));
    }
    let mut used: BTreeSet<&Elementary> = BTreeSet::new();
    for (c, img) in &emb.phi {
        if img.is_empty() {
            return Ok(EmbeddingVerdict::fail(format!("`{c}` has an empty image")));
        }
        for c2 in img {
            if !d2.set.contains(c2) {
                return Ok(EmbeddingVerdict::fail(format!("`{c2}` is not in the second instance")));
            }
            if !used.insert(c2) {
                return Ok(EmbeddingVerdict::fail(format!("`{c2}` is used by two images")));
            }
        }
    }
    // the error inequality
    for (c, img) in &emb.phi {
        let mut vars: Vec<Var> = c.vars();
        for c2 in img {
            for x in c2.vars() {
                if !vars.contains(&x) {
                    vars.push(x);
                }
            }
        }
        let mut domains = Vec::with_capacity(vars.len());
        let mut total: u64 = 1;
        for x in &vars {
            let t = d2.var_type(x).ok_or_else(|| Error::input(format!("{x} is not a variable of the second instance")))?;
            let vs = t.values(bound);
            total = total.saturating_mul(vs.len() as u64);
            domains.push(vs);
        }
        if total > VALUATION_LIMIT {
            return Err(Error::resource(format!("{total} valuations for `{c}`")));
        }
        let left: WeightedSet<Elementary> = std::iter::once((c.clone(), s1.weight(c))).collect();
        let right: WeightedSet<Elementary> = img.iter().map(|c2| (c2.clone(), d2.set.weight(c2))).collect();
        let mut idx = vec![0usize; vars.len()];
        loop {
            let v: Valuation = vars.iter().enumerate().map(|(k, x)| (x.clone(), domains[k][idx[k]])).collect();
            let lhs = comb.apply(&errors(&left, &v, kind)?);
            let rhs = comb.apply(&errors(&right, &v, kind)?);
            if lhs > rhs {
                return Ok(EmbeddingVerdict::Fails {
                    reason: format!("`{c}` errs by {lhs} but its image only by {rhs}"),
                    valuation: Some(v.into_iter().map(|(k, x)| (k.to_string(), x)).collect()),
                });
            }
            let mut j = 0;
            while j < idx.len() && idx[j] + 1 == domains[j].len() {
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
            idx[j] += 1;
        }
    }
    Ok(EmbeddingVerdict::Holds)
}
