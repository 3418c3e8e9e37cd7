//! Propagation sessions over a growing sequence of variables.
//!
//! While the sequence is open, filtering uses a contractible stand-in for
//! the constraint; after closing it switches to the constraint itself.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{CatalogSpec, ConstraintDef, Relation};
use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

pub type Domain = BTreeSet<Symbol>;

pub const DEFAULT_ENGINE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Open,
    Closed,
    Failed,
}

/// What the last propagation guarantees about the domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    /// Open D-consistent for the constraint.
    OpenDomain,
    /// Filtered with a looser stand-in: sound, possibly weaker.
    SoundOnly,
    /// Domain consistent for the closed constraint.
    Domain,
    /// Bounds reasoning on a sum.
    Bounds,
}

enum Active {
    Automaton { exact: Nfa, approx: Nfa },
    Generic { exact: ConstraintDef, approx: ConstraintDef, exact_prefix_closed: bool },
}

pub struct Session {
    spec: CatalogSpec,
    active: Active,
    tight: bool,
    static_type: Vec<Symbol>,
    phase: Phase,
    domains: Vec<Domain>,
    budget: usize,
}

impl Session {
    /// Opens a session for a catalog constraint. File references in the
    /// spec are resolved against `base`.
    pub fn open(spec: &CatalogSpec, base: Option<&Path>) -> Result<Session> {
        let spec = spec.resolve(base)?;
        let static_type = spec.static_type(None)?;
        let approximation = spec.open_approximation(None)?;
        let active = match &spec {
            CatalogSpec::Regular { automaton } => {
                let exact = automaton.load(None)?;
                let approx = exact.prefix_closure();
                Active::Automaton { exact, approx }
            }
            _ => Active::Generic {
                exact: spec.to_def(None)?,
                approx: approximation.to_def(static_type.clone(), None)?,
                exact_prefix_closed: approximation.spec.as_ref() == Some(&spec),
            },
        };
        Ok(Session {
            spec,
            active,
            tight: approximation.tight,
            static_type,
            phase: Phase::Open,
            domains: Vec::new(),
            budget: DEFAULT_ENGINE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn spec(&self) -> &CatalogSpec {
        &self.spec
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn static_type(&self) -> &[Symbol] {
        &self.static_type
    }

    /// Whether open-phase filtering reaches open D-consistency.
    pub fn approximation_is_tight(&self) -> bool {
        self.tight
    }

    fn require_open(&self, what: &str) -> Result<()> {
        match self.phase {
            Phase::Open => Ok(()),
            Phase::Closed => Err(Error::Lifecycle(format!("cannot {what}: the sequence is closed"))),
            Phase::Failed => Err(Error::Lifecycle(format!("cannot {what}: the session has failed"))),
        }
    }

    /// Appends a variable at the right-hand end. Nothing is propagated.
    pub fn add_variable(&mut self, dom: Domain) -> Result<()> {
        self.require_open("add a variable")?;
        if let Some(a) = dom.iter().find(|a| !self.static_type.contains(a)) {
            return Err(Error::UnknownSymbol(a.to_string()));
        }
        self.domains.push(dom);
        Ok(())
    }

    pub fn restrict_domain(&mut self, var: usize, values: Domain) -> Result<()> {
        if self.phase == Phase::Failed {
            return Err(Error::Lifecycle("cannot restrict: the session has failed".into()));
        }
        let current = self
            .domains
            .get(var)
            .ok_or_else(|| Error::input(format!("no variable with index {var}")))?;
        if !values.is_subset(current) {
            return Err(Error::input(format!("restriction of variable {var} is not a subset of its domain")));
        }
        self.domains[var] = values;
        Ok(())
    }

    pub fn close(&mut self) -> Result<()> {
        self.require_open("close")?;
        self.phase = Phase::Closed;
        Ok(())
    }

    fn settle(&mut self) {
        if self.domains.iter().any(|d| d.is_empty()) {
            self.phase = Phase::Failed;
        }
    }

    /// Filters the domains with the constraint active in the current phase.
    /// Does nothing once failed.
    pub fn propagate(&mut self) -> Result<Consistency> {
        let closed = match self.phase {
            Phase::Failed => return Ok(Consistency::SoundOnly),
            Phase::Open => false,
            Phase::Closed => true,
        };
        let (filtered, satisfiable) = match &self.active {
            Active::Automaton { exact, approx } => layered(if closed { exact } else { approx }, &self.domains),
            Active::Generic { exact, approx, exact_prefix_closed } => {
                let (c, pc) = if closed { (exact, *exact_prefix_closed) } else { (approx, true) };
                supports(c, pc, &self.domains, self.budget)?
            }
        };
        self.domains = filtered;
        if !satisfiable {
            self.phase = Phase::Failed;
        }
        self.settle();
        Ok(match (closed, self.tight) {
            (true, _) => Consistency::Domain,
            (false, true) => Consistency::OpenDomain,
            (false, false) => Consistency::SoundOnly,
        })
    }

    /// Bounds reasoning for sums over non-negative integers: `sum <= N`
    /// while open, the full relation once closed.
    pub fn propagate_sum_bounds(&mut self) -> Result<Consistency> {
        let (relation, bound) = match &self.spec {
            CatalogSpec::Sum { relation, bound, .. } => (*relation, *bound),
            other => return Err(Error::input(format!("bounds propagation needs a sum, not {}", other.kind()))),
        };
        let mut vals: Vec<Vec<i64>> = Vec::with_capacity(self.domains.len());
        for d in &self.domains {
            let xs = crate::algebra::ints_of(&d.iter().cloned().collect::<Vec<_>>())?;
            if xs.iter().any(|&x| x < 0) {
                return Err(Error::input("bounds propagation needs non-negative values"));
            }
            vals.push(xs);
        }
        if self.phase == Phase::Failed {
            return Ok(Consistency::Bounds);
        }
        let closed = self.phase == Phase::Closed;
        let upper = matches!(relation, Relation::Le | Relation::Eq);
        let lower = closed && matches!(relation, Relation::Ge | Relation::Eq);
        loop {
            if vals.iter().any(|v| v.is_empty()) {
                break;
            }
            let mins: i64 = vals.iter().map(|v| v[0]).sum();
            let maxs: i64 = vals.iter().map(|v| *v.last().unwrap()).sum();
            let mut changed = false;
            for v in vals.iter_mut() {
                let (lo, hi) = (v[0], *v.last().unwrap());
                let cap = if upper { bound - (mins - lo) } else { i64::MAX };
                let floor = if lower { bound - (maxs - hi) } else { i64::MIN };
                let before = v.len();
                v.retain(|&x| floor <= x && x <= cap);
                changed |= v.len() != before;
                if v.is_empty() {
                    break;
                }
            }
            if !changed {
                break;
            }
        }
        if closed && self.domains.is_empty() && !relation.holds(0, bound) {
            self.phase = Phase::Failed;
        }
        self.domains = vals.into_iter().map(|v| v.into_iter().map(Symbol::int).collect()).collect();
        self.settle();
        Ok(Consistency::Bounds)
    }
}

/// Domain consistency for words of length exactly `domains.len()` in the
/// automaton's language, by forward and backward reachability over the
/// layered state graph.
fn layered(nfa: &Nfa, domains: &[Domain]) -> (Vec<Domain>, bool) {
    let n = domains.len();
    let letters: Vec<Vec<(usize, &Symbol)>> = domains
        .iter()
        .map(|d| d.iter().filter_map(|a| nfa.symbol_index(a).map(|i| (i, a))).collect())
        .collect();
    let mut fwd: Vec<BTreeSet<usize>> = Vec::with_capacity(n + 1);
    fwd.push(nfa.start().iter().copied().collect());
    for layer in &letters {
        let prev = fwd.last().unwrap();
        let mut next = BTreeSet::new();
        for &q in prev {
            for &(a, _) in layer {
                next.extend(nfa.successors(q, a).iter().copied());
            }
        }
        fwd.push(next);
    }
    let mut live: BTreeSet<usize> = fwd[n].iter().copied().filter(|&q| nfa.is_final(q)).collect();
    let satisfiable = !live.is_empty();
    let mut out = vec![Domain::new(); n];
    for i in (0..n).rev() {
        let mut back = BTreeSet::new();
        for &q in &fwd[i] {
            for &(a, sym) in &letters[i] {
                if nfa.successors(q, a).iter().any(|t| live.contains(t)) {
                    back.insert(q);
                    out[i].insert(sym.clone());
                }
            }
        }
        live = back;
    }
    (out, satisfiable)
}

/// Domain consistency by searching for a full support of every value.
/// With `prefix_closed`, partial assignments outside the language are cut.
fn supports(c: &ConstraintDef, prefix_closed: bool, domains: &[Domain], budget: usize) -> Result<(Vec<Domain>, bool)> {
    let n = domains.len();
    let doms: Vec<Vec<Symbol>> = domains.iter().map(|d| d.iter().cloned().collect()).collect();
    let mut supported = vec![Domain::new(); n];
    let mut nodes = 0usize;
    if n == 0 || doms.iter().any(|d| d.is_empty()) {
        let ok = n == 0 && c.contains(&[]);
        return Ok((domains.to_vec(), ok));
    }
    let mut any = false;
    for i in 0..n {
        for d in &doms[i] {
            if supported[i].contains(d) {
                continue;
            }
            let mut fixed = doms.clone();
            fixed[i] = vec![d.clone()];
            let mut word = Vec::with_capacity(n);
            if let Some(w) = dfs(c, prefix_closed, &fixed, &mut word, &mut nodes, budget)? {
                any = true;
                for (j, a) in w.into_iter().enumerate() {
                    supported[j].insert(a);
                }
            }
        }
    }
    Ok((supported, any))
}

fn dfs(
    c: &ConstraintDef,
    prefix_closed: bool,
    doms: &[Vec<Symbol>],
    word: &mut Vec<Symbol>,
    nodes: &mut usize,
    budget: usize,
) -> Result<Option<Vec<Symbol>>> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::resource("support search budget exhausted"));
    }
    if prefix_closed && !c.contains(word) {
        return Ok(None);
    }
    let k = word.len();
    if k == doms.len() {
        return Ok(c.contains(word).then(|| word.clone()));
    }
    for a in &doms[k] {
        word.push(a.clone());
        let found = dfs(c, prefix_closed, doms, word, nodes, budget)?;
        word.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// One step of a scripted session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Event {
    Add { domain: Vec<Symbol> },
    Restrict { var: usize, values: Vec<Symbol> },
    Propagate,
    PropagateBounds,
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub constraint: CatalogSpec,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub phase: Phase,
    pub domains: Vec<Vec<Symbol>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<Consistency>,
}

impl Session {
    pub fn apply(&mut self, event: &Event) -> Result<Option<Consistency>> {
        match event {
            Event::Add { domain } => self.add_variable(domain.iter().cloned().collect()).map(|_| None),
            Event::Restrict { var, values } => self.restrict_domain(*var, values.iter().cloned().collect()).map(|_| None),
            Event::Propagate => self.propagate().map(Some),
            Event::PropagateBounds => self.propagate_sum_bounds().map(Some),
            Event::Close => self.close().map(|_| None),
        }
    }

    pub fn snapshot(&self, consistency: Option<Consistency>) -> TraceEntry {
        TraceEntry {
            phase: self.phase,
            domains: self.domains.iter().map(|d| d.iter().cloned().collect()).collect(),
            consistency,
        }
    }
}

/// Runs a scenario, recording the state after each event. The first
/// failing event aborts the run.
pub fn run_scenario(scenario: &Scenario, base: Option<&Path>) -> Result<Vec<TraceEntry>> {
    let mut s = Session::open(&scenario.constraint, base)?;
    let mut trace = Vec::with_capacity(scenario.events.len());
    for e in &scenario.events {
        let c = s.apply(e)?;
        trace.push(s.snapshot(c));
    }
    Ok(trace)
}
