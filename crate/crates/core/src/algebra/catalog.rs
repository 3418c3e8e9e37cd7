//! The constraint catalog and its JSON form.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{ints_of, ConstraintDef, Relation};
use crate::automata::{Nfa, NfaJson};
use crate::error::{Error, Result};
use crate::grammar::{CnfGrammar, GrammarJson};
use crate::symbol::Symbol;

/// An automaton given inline or as a path to a JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutomatonRef {
    Path(String),
    Inline(NfaJson),
}

impl AutomatonRef {
    pub fn load(&self, base: Option<&Path>) -> Result<Nfa> {
        match self {
            AutomatonRef::Inline(raw) => Nfa::from_json(raw.clone()),
            AutomatonRef::Path(p) => Nfa::from_json_str(&read_relative(p, base)?),
        }
    }
}

/// A grammar given inline or as a path to a JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GrammarRef {
    Path(String),
    Inline(GrammarJson),
}

impl GrammarRef {
    pub fn load(&self, base: Option<&Path>) -> Result<CnfGrammar> {
        match self {
            GrammarRef::Inline(raw) => CnfGrammar::from_json(raw.clone()),
            GrammarRef::Path(p) => CnfGrammar::from_json_str(&read_relative(p, base)?),
        }
    }
}

fn read_relative(p: &str, base: Option<&Path>) -> Result<String> {
    let path = match base {
        Some(b) if Path::new(p).is_relative() => b.join(p),
        _ => PathBuf::from(p),
    };
    std::fs::read_to_string(&path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

fn eq_relation() -> Relation {
    Relation::Eq
}

fn bits() -> Vec<Symbol> {
    vec![Symbol::int(0), Symbol::int(1)]
}

/// A catalog constraint with its parameters, as read from JSON.
///
/// `lex_leq` and `lex_lt` compare the variables with a fixed word `z`: a
/// word `x` is a solution when `|x| <= |z|` and `x` compares (strictly, for
/// `lex_lt`) below the prefix of `z` of the same length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogSpec {
    #[serde(alias = "all_different")]
    Alldifferent {
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    Gcc {
        values: Vec<Symbol>,
        lower: Vec<usize>,
        upper: Vec<usize>,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    WeakGcc {
        values: Vec<Symbol>,
        upper: Vec<usize>,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    Nvalue {
        #[serde(default = "eq_relation")]
        relation: Relation,
        n: usize,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    Sequence {
        lower: usize,
        upper: usize,
        k: usize,
        values: Vec<Symbol>,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    SlidingSum {
        lower: i64,
        upper: i64,
        k: usize,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    Among {
        lower: usize,
        upper: usize,
        values: Vec<Symbol>,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    Sum {
        #[serde(default = "eq_relation")]
        relation: Relation,
        bound: i64,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    LexLeq {
        z: Vec<Symbol>,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    LexLt {
        z: Vec<Symbol>,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    /// Every occurrence of `t` is preceded by an occurrence of `s`.
    Precedence {
        s: Symbol,
        t: Symbol,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    Contiguity {
        #[serde(rename = "type", default = "bits")]
        ty: Vec<Symbol>,
    },
    /// Counts maximal plateaus strictly above both neighbours.
    Peak {
        #[serde(default = "eq_relation")]
        relation: Relation,
        bound: usize,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    NoPeak {
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    /// The empty word is a solution.
    Average {
        #[serde(default = "eq_relation")]
        relation: Relation,
        bound: i64,
        #[serde(rename = "type")]
        ty: Vec<Symbol>,
    },
    Regular {
        automaton: AutomatonRef,
    },
    Cfg {
        grammar: GrammarRef,
    },
}

/// The open-phase stand-in for a constraint. `spec == None` is `true`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub spec: Option<CatalogSpec>,
    /// The approximation is the prefix closure of the constraint, so
    /// filtering with it reaches open D-consistency.
    pub tight: bool,
}

impl Approximation {
    pub fn to_def(&self, static_type: Vec<Symbol>, base: Option<&Path>) -> Result<ConstraintDef> {
        match &self.spec {
            None => Ok(ConstraintDef::truth(static_type)),
            Some(s) => s.to_def(base),
        }
    }
}

fn count(w: &[Symbol], v: &Symbol) -> usize {
    w.iter().filter(|a| *a == v).count()
}

fn distinct(w: &[Symbol]) -> usize {
    w.iter().collect::<BTreeSet<_>>().len()
}

/// Number of maximal constant runs strictly above both neighbouring runs.
pub fn peak_count(xs: &[i64]) -> usize {
    let mut runs: Vec<i64> = Vec::new();
    for &x in xs {
        if runs.last() != Some(&x) {
            runs.push(x);
        }
    }
    runs.windows(3).filter(|r| r[0] < r[1] && r[1] > r[2]).count()
}

fn check_lengths(what: &str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::input(format!("{what}: parameter lists have different lengths ({a} and {b})")));
    }
    Ok(())
}

impl CatalogSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CatalogSpec::Alldifferent { .. } => "alldifferent",
            CatalogSpec::Gcc { .. } => "gcc",
            CatalogSpec::WeakGcc { .. } => "weak_gcc",
            CatalogSpec::Nvalue { .. } => "nvalue",
            CatalogSpec::Sequence { .. } => "sequence",
            CatalogSpec::SlidingSum { .. } => "sliding_sum",
            CatalogSpec::Among { .. } => "among",
            CatalogSpec::Sum { .. } => "sum",
            CatalogSpec::LexLeq { .. } => "lex_leq",
            CatalogSpec::LexLt { .. } => "lex_lt",
            CatalogSpec::Precedence { .. } => "precedence",
            CatalogSpec::Contiguity { .. } => "contiguity",
            CatalogSpec::Peak { .. } => "peak",
            CatalogSpec::NoPeak { .. } => "no_peak",
            CatalogSpec::Average { .. } => "average",
            CatalogSpec::Regular { .. } => "regular",
            CatalogSpec::Cfg { .. } => "cfg",
        }
    }

    pub fn order_free(&self) -> bool {
        matches!(
            self,
            CatalogSpec::Alldifferent { .. }
                | CatalogSpec::Gcc { .. }
                | CatalogSpec::WeakGcc { .. }
                | CatalogSpec::Nvalue { .. }
                | CatalogSpec::Among { .. }
                | CatalogSpec::Sum { .. }
                | CatalogSpec::Average { .. }
        )
    }

    /// Replaces file references by inline JSON.
    pub fn resolve(&self, base: Option<&Path>) -> Result<CatalogSpec> {
        Ok(match self {
            CatalogSpec::Regular { automaton } => {
                CatalogSpec::Regular { automaton: AutomatonRef::Inline(automaton.load(base)?.to_json()) }
            }
            CatalogSpec::Cfg { grammar } => {
                CatalogSpec::Cfg { grammar: GrammarRef::Inline(grammar.load(base)?.to_json()) }
            }
            other => other.clone(),
        })
    }

    pub fn static_type(&self, base: Option<&Path>) -> Result<Vec<Symbol>> {
        Ok(match self {
            CatalogSpec::Alldifferent { ty }
            | CatalogSpec::Gcc { ty, .. }
            | CatalogSpec::WeakGcc { ty, .. }
            | CatalogSpec::Nvalue { ty, .. }
            | CatalogSpec::Sequence { ty, .. }
            | CatalogSpec::SlidingSum { ty, .. }
            | CatalogSpec::Among { ty, .. }
            | CatalogSpec::Sum { ty, .. }
            | CatalogSpec::LexLeq { ty, .. }
            | CatalogSpec::LexLt { ty, .. }
            | CatalogSpec::Precedence { ty, .. }
            | CatalogSpec::Contiguity { ty }
            | CatalogSpec::Peak { ty, .. }
            | CatalogSpec::NoPeak { ty }
            | CatalogSpec::Average { ty, .. } => ty.clone(),
            CatalogSpec::Regular { automaton } => automaton.load(base)?.alphabet().to_vec(),
            CatalogSpec::Cfg { grammar } => grammar.load(base)?.terminals().to_vec(),
        })
    }

    fn numeric(&self, ty: &[Symbol]) -> Result<Vec<i64>> {
        ints_of(ty).map_err(|e| Error::input(format!("{}: {e}", self.kind())))
    }

    /// The executable predicate. File references are resolved against `base`.
    pub fn to_def(&self, base: Option<&Path>) -> Result<ConstraintDef> {
        let ty = self.static_type(base)?;
        let name = self.kind();
        let of = self.order_free();
        let def = match self.clone() {
            CatalogSpec::Alldifferent { .. } => ConstraintDef::new(name, ty, of, |w| Ok(distinct(w) == w.len())),
            CatalogSpec::Gcc { values, lower, upper, .. } => {
                check_lengths(name, values.len(), lower.len())?;
                check_lengths(name, values.len(), upper.len())?;
                ConstraintDef::new(name, ty, of, move |w| {
                    Ok(values.iter().enumerate().all(|(i, v)| {
                        let c = count(w, v);
                        lower[i] <= c && c <= upper[i]
                    }))
                })
            }
            CatalogSpec::WeakGcc { values, upper, .. } => {
                check_lengths(name, values.len(), upper.len())?;
                ConstraintDef::new(name, ty, of, move |w| {
                    Ok(values.iter().zip(&upper).all(|(v, &u)| count(w, v) <= u))
                })
            }
            CatalogSpec::Nvalue { relation, n, .. } => {
                ConstraintDef::new(name, ty, of, move |w| Ok(relation.holds(distinct(w), n)))
            }
            CatalogSpec::Sequence { lower, upper, k, values, .. } => {
                if k == 0 {
                    return Err(Error::input("sequence: window length must be positive"));
                }
                ConstraintDef::new(name, ty, of, move |w| {
                    Ok(w.windows(k).all(|win| {
                        let c = win.iter().filter(|a| values.contains(a)).count();
                        lower <= c && c <= upper
                    }))
                })
            }
            CatalogSpec::SlidingSum { lower, upper, k, .. } => {
                if k == 0 {
                    return Err(Error::input("sliding_sum: window length must be positive"));
                }
                self.numeric(&ty)?;
                ConstraintDef::new(name, ty, of, move |w| {
                    let xs = ints_of(w)?;
                    Ok(xs.windows(k).all(|win| {
                        let s: i64 = win.iter().sum();
                        lower <= s && s <= upper
                    }))
                })
            }
            CatalogSpec::Among { lower, upper, values, .. } => ConstraintDef::new(name, ty, of, move |w| {
                let c = w.iter().filter(|a| values.contains(a)).count();
                Ok(lower <= c && c <= upper)
            }),
            CatalogSpec::Sum { relation, bound, .. } => {
                self.numeric(&ty)?;
                ConstraintDef::new(name, ty, of, move |w| Ok(relation.holds(ints_of(w)?.iter().sum::<i64>(), bound)))
            }
            CatalogSpec::LexLeq { z, .. } => {
                ConstraintDef::new(name, ty, of, move |w| Ok(w.len() <= z.len() && *w <= z[..w.len()]))
            }
            CatalogSpec::LexLt { z, .. } => {
                ConstraintDef::new(name, ty, of, move |w| Ok(w.len() <= z.len() && *w < z[..w.len()]))
            }
            CatalogSpec::Precedence { s, t, .. } => ConstraintDef::new(name, ty, of, move |w| {
                let first_s = w.iter().position(|a| *a == s);
                let first_t = w.iter().position(|a| *a == t);
                Ok(match (first_s, first_t) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(i), Some(j)) => i < j,
                })
            }),
            CatalogSpec::Contiguity { .. } => {
                self.numeric(&ty)?;
                ConstraintDef::new(name, ty, of, |w| {
                    let ones: Vec<usize> =
                        w.iter().enumerate().filter(|(_, a)| a.as_int() == Some(1)).map(|(i, _)| i).collect();
                    Ok(ones.windows(2).all(|p| p[1] == p[0] + 1))
                })
            }
            CatalogSpec::Peak { relation, bound, .. } => {
                self.numeric(&ty)?;
                ConstraintDef::new(name, ty, of, move |w| Ok(relation.holds(peak_count(&ints_of(w)?), bound)))
            }
            CatalogSpec::NoPeak { .. } => {
                self.numeric(&ty)?;
                ConstraintDef::new(name, ty, of, |w| Ok(peak_count(&ints_of(w)?) == 0))
            }
            CatalogSpec::Average { relation, bound, .. } => {
                self.numeric(&ty)?;
                ConstraintDef::new(name, ty, of, move |w| {
                    if w.is_empty() {
                        return Ok(true);
                    }
                    let s: i64 = ints_of(w)?.iter().sum();
                    let avg = Rational64::new(s, w.len() as i64);
                    Ok(relation.holds(avg, Rational64::from_integer(bound)))
                })
            }
            CatalogSpec::Regular { automaton } => {
                let nfa = automaton.load(base)?;
                ConstraintDef::new(name, ty, false, move |w| nfa.accepts(w))
            }
            CatalogSpec::Cfg { grammar } => {
                let g = grammar.load(base)?;
                ConstraintDef::new(name, ty, false, move |w| g.cyk_accepts(w))
            }
        };
        Ok(def)
    }

    /// The registered contractible approximation used while the variable
    /// sequence is still open.
    pub fn open_approximation(&self, base: Option<&Path>) -> Result<Approximation> {
        let same = |tight| Ok(Approximation { spec: Some(self.clone()), tight });
        let trivial = |tight| Ok(Approximation { spec: None, tight });
        let swap = |spec, tight| Ok(Approximation { spec: Some(spec), tight });
        match self {
            CatalogSpec::Alldifferent { .. }
            | CatalogSpec::WeakGcc { .. }
            | CatalogSpec::Sequence { .. }
            | CatalogSpec::SlidingSum { .. }
            | CatalogSpec::LexLeq { .. }
            | CatalogSpec::Precedence { .. }
            | CatalogSpec::Contiguity { .. }
            | CatalogSpec::NoPeak { .. } => same(true),
            CatalogSpec::Gcc { values, lower, upper, ty } => {
                // every prefix within the upper bounds extends to a solution
                // when the lower bounds are jointly satisfiable
                let tight = lower.iter().zip(upper).all(|(l, u)| l <= u) && values.iter().all(|v| ty.contains(v));
                swap(CatalogSpec::WeakGcc { values: values.clone(), upper: upper.clone(), ty: ty.clone() }, tight)
            }
            CatalogSpec::Nvalue { relation, n, ty } => {
                let enough = distinct(ty) >= *n;
                match relation {
                    Relation::Le => same(true),
                    Relation::Eq => {
                        swap(CatalogSpec::Nvalue { relation: Relation::Le, n: *n, ty: ty.clone() }, enough)
                    }
                    Relation::Ge => trivial(enough),
                }
            }
            CatalogSpec::Among { lower, upper, values, ty } => {
                let reachable = *lower == 0 || values.iter().any(|v| ty.contains(v));
                let weak = CatalogSpec::Among { lower: 0, upper: *upper, values: values.clone(), ty: ty.clone() };
                swap(weak, reachable && lower <= upper)
            }
            CatalogSpec::Sum { relation, bound, ty } => {
                let xs = self.numeric(ty)?;
                let nonneg = xs.iter().all(|&x| x >= 0);
                match relation {
                    Relation::Le if nonneg => same(true),
                    Relation::Eq if nonneg => {
                        let le = CatalogSpec::Sum { relation: Relation::Le, bound: *bound, ty: ty.clone() };
                        swap(le, xs.contains(&1) && *bound >= 0)
                    }
                    Relation::Ge if nonneg => trivial(xs.iter().any(|&x| x > 0)),
                    _ => trivial(false),
                }
            }
            CatalogSpec::LexLt { z, ty } => swap(CatalogSpec::LexLeq { z: z.clone(), ty: ty.clone() }, false),
            CatalogSpec::Peak { relation, bound, ty } => {
                let le = CatalogSpec::Peak { relation: Relation::Le, bound: *bound, ty: ty.clone() };
                match relation {
                    Relation::Le => same(true),
                    Relation::Eq => swap(le, false),
                    Relation::Ge => trivial(distinct(ty) >= 2),
                }
            }
            CatalogSpec::Average { .. } => trivial(false),
            CatalogSpec::Regular { automaton } => {
                let closed = automaton.load(base)?.prefix_closure();
                swap(CatalogSpec::Regular { automaton: AutomatonRef::Inline(closed.to_json()) }, true)
            }
            CatalogSpec::Cfg { grammar } => {
                let closed = grammar.load(base)?.prefix_closure_cnf().grammar;
                swap(CatalogSpec::Cfg { grammar: GrammarRef::Inline(closed.to_json()) }, true)
            }
        }
    }

    /// Longest extension needed to witness that a prefix of a solution is
    /// one, when that is known.
    pub fn extension_bound(&self, base: Option<&Path>) -> Result<Option<usize>> {
        Ok(match self {
            CatalogSpec::Gcc { lower, .. } => Some(lower.iter().sum()),
            CatalogSpec::Nvalue { n, .. } => Some(*n),
            CatalogSpec::Among { lower, .. } => Some(*lower),
            CatalogSpec::Sum { bound, .. } => usize::try_from(*bound).ok(),
            CatalogSpec::Regular { automaton } => Some(automaton.load(base)?.num_states()),
            CatalogSpec::Cfg { .. } | CatalogSpec::Average { .. } | CatalogSpec::Peak { .. } => None,
            CatalogSpec::LexLt { z, .. } => Some(z.len()),
            _ => Some(0),
        })
    }
}
