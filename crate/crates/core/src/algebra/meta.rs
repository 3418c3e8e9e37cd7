//! Meta-constraints and logical combinators.

use super::ConstraintDef;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

fn inner_arity(inner: &ConstraintDef) -> Result<usize> {
    match inner.arity {
        Some(k) if k > 0 => Ok(k),
        _ => Err(Error::input(format!("{} needs a fixed positive arity to be slid or splashed", inner.name))),
    }
}

/// Applies `inner` (of arity `k`) to the windows starting at positions
/// `p, p + j, p + 2j, ...` (1-based) that fit entirely inside `w`.
pub fn slide_eval(p: usize, j: usize, inner: &ConstraintDef, w: &[Symbol]) -> Result<bool> {
    if p == 0 || j == 0 {
        return Err(Error::input("slide offset and step must be at least 1"));
    }
    let k = inner_arity(inner)?;
    let mut start = p - 1;
    while start + k <= w.len() {
        if !inner.eval(&w[start..start + k])? {
            return Ok(false);
        }
        start += j;
    }
    Ok(true)
}

pub fn slide(p: usize, j: usize, inner: ConstraintDef) -> Result<ConstraintDef> {
    if p == 0 || j == 0 {
        return Err(Error::input("slide offset and step must be at least 1"));
    }
    inner_arity(&inner)?;
    let name = format!("slide[{p},{j}]({})", inner.name);
    let ty = inner.static_type.clone();
    Ok(ConstraintDef::new(name, ty, false, move |w| slide_eval(p, j, &inner, w)))
}

/// Applies `inner` (of arity `k`) to every length-`k` subsequence of `w`.
pub fn splash_eval(inner: &ConstraintDef, w: &[Symbol]) -> Result<bool> {
    let k = inner_arity(inner)?;
    if k > w.len() {
        return Ok(true);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let sub: Vec<Symbol> = idx.iter().map(|&i| w[i].clone()).collect();
        if !inner.eval(&sub)? {
            return Ok(false);
        }
        // next combination in lexicographic order
        let mut i = k;
        while i > 0 && idx[i - 1] == w.len() - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(true);
        }
        idx[i - 1] += 1;
        for t in i..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

pub fn splash(inner: ConstraintDef) -> Result<ConstraintDef> {
    inner_arity(&inner)?;
    let name = format!("splash({})", inner.name);
    let ty = inner.static_type.clone();
    Ok(ConstraintDef::new(name, ty, true, move |w| splash_eval(&inner, w)))
}

fn union_type(a: &ConstraintDef, b: &ConstraintDef) -> Vec<Symbol> {
    let mut ty = a.static_type.clone();
    for s in &b.static_type {
        if !ty.contains(s) {
            ty.push(s.clone());
        }
    }
    ty
}

pub fn and(a: ConstraintDef, b: ConstraintDef) -> ConstraintDef {
    let name = format!("and({}, {})", a.name, b.name);
    let order_free = a.order_free && b.order_free;
    ConstraintDef::new(name, union_type(&a, &b), order_free, move |w| Ok(a.contains(w) && b.contains(w)))
}

pub fn or(a: ConstraintDef, b: ConstraintDef) -> ConstraintDef {
    let name = format!("or({}, {})", a.name, b.name);
    let order_free = a.order_free && b.order_free;
    ConstraintDef::new(name, union_type(&a, &b), order_free, move |w| Ok(a.contains(w) || b.contains(w)))
}

pub fn not(a: ConstraintDef) -> ConstraintDef {
    let name = format!("not({})", a.name);
    ConstraintDef::new(name, a.static_type.clone(), a.order_free, move |w| Ok(!a.contains(w)))
}

fn quantify(pos: usize, a: ConstraintDef, exists: bool) -> Result<ConstraintDef> {
    if pos == 0 {
        return Err(Error::input("positions are 1-based"));
    }
    if a.static_type.is_empty() {
        return Err(Error::input("quantified positions need a finite, non-empty type"));
    }
    let name = format!("{}[{pos}]({})", if exists { "exists" } else { "forall" }, a.name);
    let ty = a.static_type.clone();
    Ok(ConstraintDef::new(name, ty, false, move |w| {
        if w.len() < pos {
            return Ok(a.contains(w));
        }
        let mut v = w.to_vec();
        let mut test = |s: &Symbol| {
            v[pos - 1] = s.clone();
            a.contains(&v)
        };
        Ok(if exists { a.static_type.iter().any(&mut test) } else { a.static_type.iter().all(&mut test) })
    }))
}

/// Projects out the variable at `pos`: the word is a solution when some
/// value of the type at that position makes it one.
pub fn exists_at(pos: usize, a: ConstraintDef) -> Result<ConstraintDef> {
    quantify(pos, a, true)
}

pub fn forall_at(pos: usize, a: ConstraintDef) -> Result<ConstraintDef> {
    quantify(pos, a, false)
}
