//! Context-free grammars in Chomsky normal form.

use std::collections::{BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhsJson {
    Pair(Vec<String>),
    Single(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionJson {
    pub lhs: String,
    pub rhs: RhsJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarJson {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<Symbol>,
    pub start: String,
    pub productions: Vec<ProductionJson>,
}

const EPSILON: &str = "eps";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Body {
    Pair(usize, usize),
    Terminal(usize),
    Epsilon,
    // only present while building; never in a finished grammar
    Unit(usize),
}

impl Body {
    fn size(self) -> usize {
        match self {
            Body::Pair(..) => 3,
            Body::Terminal(_) | Body::Unit(_) => 2,
            Body::Epsilon => 1,
        }
    }
}

/// A grammar in Chomsky normal form. Only the start symbol may derive the
/// empty word, and if it does it never appears on a right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfGrammar {
    nonterminals: Vec<String>,
    terminals: Vec<Symbol>,
    start: usize,
    rules: Vec<(usize, Body)>,
}

/// Result of the prefix-closure construction, with the size of the
/// intermediate grammar before unit rules were removed.
#[derive(Debug, Clone)]
pub struct PrefixClosedGrammar {
    pub grammar: CnfGrammar,
    pub intermediate_size: usize,
    pub intermediate_unit_rules: usize,
}

impl CnfGrammar {
    pub fn from_json(raw: GrammarJson) -> Result<CnfGrammar> {
        let mut nt = HashMap::new();
        for (i, a) in raw.nonterminals.iter().enumerate() {
            if nt.insert(a.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate nonterminal `{a}`")));
            }
        }
        let mut t = HashMap::new();
        for (i, a) in raw.terminals.iter().enumerate() {
            if nt.contains_key(a.as_str()) {
                return Err(Error::input(format!("`{a}` is both terminal and nonterminal")));
            }
            if t.insert(a.as_str().to_string(), i).is_some() {
                return Err(Error::input(format!("duplicate terminal `{a}`")));
            }
        }
        let nonterminal = |name: &str| {
            nt.get(name).copied().ok_or_else(|| Error::input(format!("unknown nonterminal `{name}`")))
        };
        let start = nonterminal(&raw.start)?;
        let mut rules = Vec::new();
        for p in &raw.productions {
            let lhs = nonterminal(&p.lhs)?;
            let body = match &p.rhs {
                RhsJson::Pair(v) if v.len() == 2 => Body::Pair(nonterminal(&v[0])?, nonterminal(&v[1])?),
                RhsJson::Pair(v) => {
                    return Err(Error::input(format!(
                        "right-hand side of `{}` has {} symbols; CNF needs 2 nonterminals",
                        p.lhs,
                        v.len()
                    )))
                }
                RhsJson::Single(s) if s == EPSILON => Body::Epsilon,
                RhsJson::Single(s) => match t.get(s.as_str()) {
                    Some(&a) => Body::Terminal(a),
                    None => return Err(Error::input(format!("unknown terminal `{s}`"))),
                },
            };
            rules.push((lhs, body));
        }
        let g = CnfGrammar { nonterminals: raw.nonterminals, terminals: raw.terminals, start, rules }
            .normalized();
        g.validate()?;
        Ok(g)
    }

    pub fn from_json_str(text: &str) -> Result<CnfGrammar> {
        let raw: GrammarJson =
            serde_json::from_str(text).map_err(|e| Error::input(format!("grammar JSON: {e}")))?;
        CnfGrammar::from_json(raw)
    }

    fn validate(&self) -> Result<()> {
        let mut start_has_eps = false;
        for &(lhs, body) in &self.rules {
            match body {
                Body::Epsilon if lhs != self.start => {
                    return Err(Error::input(format!(
                        "only the start symbol may derive eps, not `{}`",
                        self.nonterminals[lhs]
                    )))
                }
                Body::Epsilon => start_has_eps = true,
                Body::Unit(_) => return Err(Error::input("unit rules are not CNF")),
                _ => {}
            }
        }
        let start_on_rhs = self
            .rules
            .iter()
            .any(|&(_, b)| matches!(b, Body::Pair(x, y) if x == self.start || y == self.start));
        if start_has_eps && start_on_rhs {
            return Err(Error::input("start symbol derives eps and also occurs on a right-hand side"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> GrammarJson {
        let name = |i: usize| self.nonterminals[i].clone();
        GrammarJson {
            nonterminals: self.nonterminals.clone(),
            terminals: self.terminals.clone(),
            start: name(self.start),
            productions: self
                .rules
                .iter()
                .map(|&(lhs, body)| ProductionJson {
                    lhs: name(lhs),
                    rhs: match body {
                        Body::Pair(x, y) => RhsJson::Pair(vec![name(x), name(y)]),
                        Body::Terminal(a) => RhsJson::Single(self.terminals[a].to_string()),
                        Body::Epsilon => RhsJson::Single(EPSILON.to_string()),
                        Body::Unit(_) => unreachable!("finished grammars have no unit rules"),
                    },
                })
                .collect(),
        }
    }

    pub fn terminals(&self) -> &[Symbol] {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn start_symbol(&self) -> &str {
        &self.nonterminals[self.start]
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    /// Total number of symbol occurrences over all productions.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|&(_, b)| b.size()).sum()
    }

    fn normalized(mut self) -> Self {
        self.rules.sort_unstable();
        self.rules.dedup();
        self
    }

    pub fn cyk_accepts(&self, w: &[Symbol]) -> Result<bool> {
        let word = w
            .iter()
            .map(|a| {
                self.terminals.iter().position(|t| t == a).ok_or_else(|| Error::UnknownSymbol(a.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.cyk_encoded(&word))
    }

    fn cyk_encoded(&self, w: &[usize]) -> bool {
        let n = w.len();
        if n == 0 {
            return self.rules.iter().any(|&(l, b)| l == self.start && b == Body::Epsilon);
        }
        let k = self.nonterminals.len();
        // table[i][len - 1][A]: A derives w[i..i + len]
        let mut table = vec![vec![vec![false; k]; n]; n];
        for (i, &a) in w.iter().enumerate() {
            for &(l, b) in &self.rules {
                if b == Body::Terminal(a) {
                    table[i][0][l] = true;
                }
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                for split in 1..len {
                    for &(l, b) in &self.rules {
                        if let Body::Pair(x, y) = b {
                            if table[i][split - 1][x] && table[i + split][len - split - 1][y] {
                                table[i][len - 1][l] = true;
                            }
                        }
                    }
                }
            }
        }
        table[0][n - 1][self.start]
    }

    /// Removes unproductive and then unreachable nonterminals. The start
    /// symbol is always kept so that the result is a valid grammar.
    pub fn remove_useless(&self) -> CnfGrammar {
        let k = self.nonterminals.len();
        let mut productive = vec![false; k];
        loop {
            let mut changed = false;
            for &(l, b) in &self.rules {
                if productive[l] {
                    continue;
                }
                let ok = match b {
                    Body::Pair(x, y) => productive[x] && productive[y],
                    Body::Unit(x) => productive[x],
                    Body::Terminal(_) | Body::Epsilon => true,
                };
                if ok {
                    productive[l] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let usable = |b: Body| match b {
            Body::Pair(x, y) => productive[x] && productive[y],
            Body::Unit(x) => productive[x],
            _ => true,
        };
        let rules: Vec<(usize, Body)> =
            self.rules.iter().copied().filter(|&(l, b)| productive[l] && usable(b)).collect();
        let mut reachable = vec![false; k];
        reachable[self.start] = true;
        let mut stack = vec![self.start];
        while let Some(a) = stack.pop() {
            for &(l, b) in &rules {
                if l != a {
                    continue;
                }
                let next: &[usize] = match &b {
                    Body::Pair(x, y) => &[*x, *y],
                    Body::Unit(x) => std::slice::from_ref(x),
                    _ => &[],
                };
                for &c in next {
                    if !reachable[c] {
                        reachable[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..k).filter(|&a| reachable[a]).collect();
        let mut remap = vec![usize::MAX; k];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let rules = rules
            .into_iter()
            .filter(|&(l, _)| reachable[l])
            .map(|(l, b)| {
                let b = match b {
                    Body::Pair(x, y) => Body::Pair(remap[x], remap[y]),
                    Body::Unit(x) => Body::Unit(remap[x]),
                    other => other,
                };
                (remap[l], b)
            })
            .collect();
        CnfGrammar {
            nonterminals: keep.iter().map(|&a| self.nonterminals[a].clone()).collect(),
            terminals: self.terminals.clone(),
            start: remap[self.start],
            rules,
        }
        .normalized()
    }

    /// Grammar for the prefix closure of the language.
    ///
    /// Every nonterminal `A` gets a copy `A_p` generating the non-empty
    /// prefixes of `L(A)`, and a new start symbol derives either the empty
    /// word or a non-empty prefix of the old start. Unit rules introduced by
    /// the copies are then removed: strongly connected groups of unit rules
    /// are merged into one nonterminal, and the remaining acyclic unit rules
    /// are expanded bottom-up.
    pub fn prefix_closure_cnf(&self) -> PrefixClosedGrammar {
        let g = self.remove_useless();
        let k = g.nonterminals.len();
        let mut names = g.nonterminals.clone();
        let taken: BTreeSet<String> = names.iter().cloned().collect();
        let fresh = |base: String, taken: &BTreeSet<String>| {
            let mut name = base;
            while taken.contains(&name) {
                name.push('\'');
            }
            name
        };
        let mut taken = taken;
        for a in 0..k {
            let name = fresh(format!("{}_p", g.nonterminals[a]), &taken);
            taken.insert(name.clone());
            names.push(name);
        }
        let start = names.len();
        names.push(fresh(format!("{}_start", g.nonterminals[g.start]), &taken));
        let p = |a: usize| a + k;

        let mut rules: Vec<(usize, Body)> =
            g.rules.iter().copied().filter(|&(l, b)| !(l == g.start && b == Body::Epsilon)).collect();
        rules.push((start, Body::Epsilon));
        rules.push((start, Body::Unit(p(g.start))));
        for &(l, b) in &g.rules {
            match b {
                Body::Terminal(a) => rules.push((p(l), Body::Terminal(a))),
                Body::Pair(x, y) => {
                    rules.push((p(l), Body::Unit(p(x))));
                    rules.push((p(l), Body::Pair(x, p(y))));
                }
                _ => {}
            }
        }
        let intermediate = CnfGrammar { nonterminals: names, terminals: g.terminals.clone(), start, rules }
            .normalized();
        let intermediate_size = intermediate.size();
        let intermediate_unit_rules =
            intermediate.rules.iter().filter(|(_, b)| matches!(b, Body::Unit(_))).count();
        let grammar = intermediate.eliminate_units().remove_useless();
        PrefixClosedGrammar { grammar, intermediate_size, intermediate_unit_rules }
    }

    fn eliminate_units(&self) -> CnfGrammar {
        let k = self.nonterminals.len();
        let mut graph = DiGraph::<usize, ()>::new();
        let nodes: Vec<_> = (0..k).map(|a| graph.add_node(a)).collect();
        for &(l, b) in &self.rules {
            if let Body::Unit(x) = b {
                graph.add_edge(nodes[l], nodes[x], ());
            }
        }
        // tarjan_scc lists components sinks first
        let sccs = tarjan_scc(&graph);
        let mut rep = (0..k).collect::<Vec<_>>();
        for comp in &sccs {
            let r = comp.iter().map(|&n| graph[n]).min().unwrap();
            for &n in comp {
                rep[graph[n]] = r;
            }
        }
        let rename = |b: Body| match b {
            Body::Pair(x, y) => Body::Pair(rep[x], rep[y]),
            Body::Unit(x) => Body::Unit(rep[x]),
            other => other,
        };
        let merged: Vec<(usize, Body)> = self
            .rules
            .iter()
            .map(|&(l, b)| (rep[l], rename(b)))
            .filter(|&(l, b)| b != Body::Unit(l))
            .collect();
        let mut own: Vec<BTreeSet<Body>> = vec![BTreeSet::new(); k];
        let mut units: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        for &(l, b) in &merged {
            match b {
                Body::Unit(x) => {
                    units[l].insert(x);
                }
                other => {
                    own[l].insert(other);
                }
            }
        }
        let mut done = vec![false; k];
        for comp in &sccs {
            let r = rep[graph[comp[0]]];
            if done[r] {
                continue;
            }
            // successors of r were finished earlier because sinks come first
            let inherited: Vec<Body> =
                units[r].iter().flat_map(|&x| own[x].iter().copied().collect::<Vec<_>>()).collect();
            own[r].extend(inherited);
            done[r] = true;
        }
        let rules = (0..k)
            .filter(|&a| rep[a] == a)
            .flat_map(|a| own[a].iter().map(move |&b| (a, b)).collect::<Vec<_>>())
            .collect();
        CnfGrammar {
            nonterminals: self.nonterminals.clone(),
            terminals: self.terminals.clone(),
            start: rep[self.start],
            rules,
        }
        .normalized()
    }
}
