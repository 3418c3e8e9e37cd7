use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use opencons::algebra::{contractibility_oracle, CatalogSpec, Direction};
use opencons::automata::{determinize, Nfa, DEFAULT_MAX_DFA_STATES};
use opencons::engine::{Event, Phase, Scenario, Session};
use opencons::grammar::CnfGrammar;
use opencons::oracle::{
    contractible_bruteforce, edit_distance_bruteforce, enumerate_language, nondecreasing_bruteforce,
    open_dconsistency_bruteforce, prefix_set, ClosureVerdict,
};
use opencons::softdecomp::{
    covering_check, drop_lower_bounds, natural_embedding, semantic_embedding_check, Comb, DecompParams, ErrorKind,
    Family, DEFAULT_COVERING_BUDGET,
};
use opencons::softedit::{
    approx_measures, contractibility_status, m_star_bounded, EditWeights, OpenEditMeasure, DEFAULT_SEARCH_BUDGET,
};
use opencons::symbol::{format_word, parse_word};
use opencons::{Cost, Error};

#[derive(Args, Clone)]
struct Common {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Re-check the result with brute-force reference implementations.
    #[arg(long, global = true)]
    oracle: bool,
    /// Separator between symbols in words (default: one character each).
    #[arg(long, global = true)]
    sep: Option<String>,
    /// Length bound for enumeration-based checks.
    #[arg(long, global = true, default_value_t = 6)]
    max_len: usize,
    /// Node budget for searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Report size, determinism and prefix-closedness of an automaton.
    AnalyzeAutomaton { file: PathBuf },
    /// Print the automaton for the prefix closure.
    PrefixClose { file: PathBuf },
    /// Report size and bounded prefix-closedness of a CNF grammar.
    AnalyzeGrammar { file: PathBuf },
    /// Print a CNF grammar for the prefix closure.
    PrefixCloseGrammar { file: PathBuf },
    /// Bounded closure check of a catalog constraint.
    CheckContractible {
        spec: PathBuf,
        #[arg(long, default_value = "prefix")]
        direction: String,
    },
    /// Run a propagation scenario and print the trace.
    Propagate { scenario: PathBuf },
    /// Evaluate an open edit-based measure.
    SoftEdit {
        #[arg(long)]
        automaton: PathBuf,
        /// alpha,beta,gamma,delta (substitution, insertion, deletion,
        /// transposition); `inf` forbids an operation.
        #[arg(long)]
        weights: String,
        #[arg(long)]
        word: String,
        /// Also evaluate the four reweighted approximations and their maximum.
        #[arg(long)]
        approx: bool,
        /// Minimum over extensions up to this length.
        #[arg(long)]
        mstar: Option<usize>,
    },
    /// Evaluate a decomposition-based measure.
    SoftDecomp {
        /// alldiff_diseq, alldiff_bounds, contiguity_slide, rising_sawtooth or gcc_full
        name: String,
        /// Values range over 1..=d.
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, value_delimiter = ',')]
        lower: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        upper: Vec<usize>,
        /// sum, max, count or sum_of_squares
        #[arg(long, default_value = "count")]
        comb: String,
        /// binary or amount
        #[arg(long, default_value = "binary")]
        error: String,
        /// Drop the lower count bounds.
        #[arg(long)]
        weaken: bool,
        /// Comma-separated integer values of the sequence.
        #[arg(long, value_delimiter = ',')]
        values: Vec<i64>,
        /// Also check covering, embedding and monotonicity.
        #[arg(long)]
        analyze: bool,
    },
}

/// Open global constraints: contractibility, prefix closures, propagation
/// and soft constraint measures.
#[derive(Parser)]
#[command(name = "opencons", version)]
struct Wrapper {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

enum Failure {
    /// The computation succeeded but ended in an inconsistent state.
    Domain(Value, String),
    Oracle(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(Value, String), Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::Input(msg.into()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

fn load_nfa(path: &Path) -> Result<Nfa, Failure> {
    Ok(Nfa::from_json_str(&read(path)?)?)
}

fn load_grammar(path: &Path) -> Result<CnfGrammar, Failure> {
    Ok(CnfGrammar::from_json_str(&read(path)?)?)
}

fn base_of(path: &Path) -> Option<&Path> {
    path.parent()
}

fn snake(name: &str) -> String {
    let mut out = String::new();
    for (i, ch) in name.chars().enumerate() {
        if ch.is_uppercase() && i > 0 {
            out.push('_');
        }
        out.extend(ch.to_lowercase());
    }
    out
}

fn verdict_json(v: &ClosureVerdict, sep: Option<&str>) -> Value {
    match v {
        ClosureVerdict::Holds => json!({"verdict": "holds"}),
        ClosureVerdict::Fails { member, reduced } => json!({
            "verdict": "fails",
            "member": format_word(member, sep),
            "reduced": format_word(reduced, sep),
        }),
    }
}

fn verdict_text(v: &ClosureVerdict, sep: Option<&str>) -> String {
    match v {
        ClosureVerdict::Holds => "holds".into(),
        ClosureVerdict::Fails { member, reduced } => {
            format!("fails: `{}` is a solution but `{}` is not", format_word(member, sep), format_word(reduced, sep))
        }
    }
}

fn analyze_automaton(c: &Common, file: &Path) -> Outcome {
    let nfa = load_nfa(file)?;
    let dfa = determinize(&nfa, DEFAULT_MAX_DFA_STATES)?;
    let closed = dfa.is_prefix_closed();
    let promoted: Vec<&str> = nfa.promoted_states().into_iter().map(|q| nfa.state_name(q)).collect();
    if c.oracle {
        let bound = dfa.as_nfa().num_states() + 1;
        let member = |w: &[_]| nfa.accepts(w).unwrap_or(false);
        let oracle = contractible_bruteforce(&member, nfa.alphabet(), bound);
        if oracle.holds() != closed {
            return Err(Failure::Oracle(format!(
                "prefix-closedness {closed} but enumeration up to length {bound} says {}",
                oracle.holds()
            )));
        }
    }
    let value = json!({
        "states": nfa.num_states(),
        "transitions": nfa.num_transitions(),
        "deterministic": nfa.is_deterministic(),
        "prefix_closed": closed,
        "promoted_states": promoted,
    });
    let text = format!(
        "states: {}\ntransitions: {}\ndeterministic: {}\nprefix-closed: {}\npromoted states: {}",
        nfa.num_states(),
        nfa.num_transitions(),
        nfa.is_deterministic(),
        closed,
        if promoted.is_empty() { "none".to_string() } else { promoted.join(", ") }
    );
    Ok((value, text))
}

fn prefix_close(c: &Common, file: &Path) -> Outcome {
    let nfa = load_nfa(file)?;
    let closed = nfa.prefix_closure();
    if c.oracle {
        let sigma = nfa.alphabet();
        let wide = enumerate_language(&|w| nfa.accepts(w).unwrap_or(false), sigma, c.max_len + nfa.num_states());
        let expected: BTreeSet<_> = prefix_set(&wide).into_iter().filter(|w| w.len() <= c.max_len).collect();
        let got: BTreeSet<_> =
            enumerate_language(&|w| closed.accepts(w).unwrap_or(false), sigma, c.max_len).into_iter().collect();
        if expected != got {
            return Err(Failure::Oracle("closure disagrees with the enumerated prefixes".into()));
        }
    }
    let value = serde_json::to_value(closed.to_json()).expect("automata serialize");
    let text = serde_json::to_string_pretty(&value).expect("values print");
    Ok((value, text))
}

fn analyze_grammar(c: &Common, file: &Path) -> Outcome {
    let g = load_grammar(file)?;
    let member = |w: &[_]| g.cyk_accepts(w).unwrap_or(false);
    let verdict = contractible_bruteforce(&member, g.terminals(), c.max_len);
    let sep = c.sep.as_deref();
    let value = json!({
        "nonterminals": g.nonterminals().len(),
        "terminals": g.terminals().len(),
        "rules": g.num_rules(),
        "size": g.size(),
        "prefix_closed_up_to": c.max_len,
        "prefix_closed": verdict_json(&verdict, sep),
    });
    let text = format!(
        "nonterminals: {}\nterminals: {}\nrules: {}\nsize: {}\nprefix-closed up to length {}: {}",
        g.nonterminals().len(),
        g.terminals().len(),
        g.num_rules(),
        g.size(),
        c.max_len,
        verdict_text(&verdict, sep)
    );
    Ok((value, text))
}

fn prefix_close_grammar(c: &Common, file: &Path) -> Outcome {
    let g = load_grammar(file)?;
    let closed = g.prefix_closure_cnf();
    if c.oracle {
        let sigma = g.terminals();
        let wide = enumerate_language(&|w| g.cyk_accepts(w).unwrap_or(false), sigma, 2 * c.max_len);
        let expected: BTreeSet<_> = prefix_set(&wide).into_iter().filter(|w| w.len() <= c.max_len).collect();
        let got: BTreeSet<_> =
            enumerate_language(&|w| closed.grammar.cyk_accepts(w).unwrap_or(false), sigma, c.max_len)
                .into_iter()
                .collect();
        if expected != got {
            return Err(Failure::Oracle("closure grammar disagrees with the enumerated prefixes".into()));
        }
    }
    let value = json!({
        "grammar": serde_json::to_value(closed.grammar.to_json()).expect("grammars serialize"),
        "original_size": g.size(),
        "intermediate_size": closed.intermediate_size,
        "final_size": closed.grammar.size(),
    });
    let text = serde_json::to_string_pretty(&value).expect("values print");
    Ok((value, text))
}

fn check_contractible(c: &Common, path: &Path, direction: &str) -> Outcome {
    let spec: CatalogSpec =
        serde_json::from_str(&read(path)?).map_err(|e| input(format!("bad constraint spec: {e}")))?;
    let base = base_of(path);
    let direction: Direction = direction.parse()?;
    let def = spec.to_def(base)?;
    let alphabet = spec.static_type(base)?;
    let verdict = contractibility_oracle(&def, &alphabet, c.max_len, direction);
    let approximation = spec.open_approximation(base)?;
    let sep = c.sep.as_deref();
    let mut value = verdict_json(&verdict, sep);
    value["direction"] = json!(format!("{direction:?}").to_lowercase());
    value["checked_up_to"] = json!(c.max_len);
    value["order_free"] = json!(spec.order_free());
    value["open_approximation"] = json!({
        "kind": approximation.spec.as_ref().map_or("true", |s| s.kind()),
        "tight": approximation.tight,
    });
    let text = format!(
        "{} closure up to length {}: {}\nopen approximation: {}{}",
        format!("{direction:?}").to_lowercase(),
        c.max_len,
        verdict_text(&verdict, sep),
        approximation.spec.as_ref().map_or("true", |s| s.kind()),
        if approximation.tight { " (tight)" } else { "" }
    );
    Ok((value, text))
}

fn propagate(c: &Common, path: &Path) -> Outcome {
    let scenario: Scenario =
        serde_json::from_str(&read(path)?).map_err(|e| input(format!("bad scenario: {e}")))?;
    let base = base_of(path);
    let mut session = Session::open(&scenario.constraint, base)?;
    if let Some(b) = c.budget {
        session = session.with_budget(b);
    }
    let oracle = if c.oracle {
        let spec = scenario.constraint.resolve(base)?;
        Some((spec.to_def(None)?, spec.extension_bound(None)?, spec.static_type(None)?))
    } else {
        None
    };
    let mut trace = Vec::new();
    for event in &scenario.events {
        let before: Vec<_> = session.domains().to_vec();
        let phase = session.phase();
        let consistency = session.apply(event)?;
        if let (Some((def, extra, sigma)), Event::Propagate) = (&oracle, event) {
            let extra = match phase {
                Phase::Closed => Some(0),
                Phase::Open if session.approximation_is_tight() => *extra,
                _ => None,
            };
            if let (Some(extra), false) = (extra, before.is_empty()) {
                let member = |w: &[_]| def.contains(w);
                let expected = open_dconsistency_bruteforce(&member, &before, sigma, extra);
                if expected != session.domains() {
                    return Err(Failure::Oracle(format!(
                        "propagation gave {:?} but the definition gives {expected:?}",
                        session.domains()
                    )));
                }
            }
        }
        trace.push(session.snapshot(consistency));
    }
    let value = serde_json::to_value(&trace).expect("traces serialize");
    let mut text = String::new();
    for (k, (event, entry)) in scenario.events.iter().zip(&trace).enumerate() {
        let doms: Vec<String> = entry
            .domains
            .iter()
            .map(|d| format!("{{{}}}", d.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        text.push_str(&format!(
            "{k}: {:<16} {:<7} [{}]\n",
            snake(format!("{event:?}").split_whitespace().next().unwrap_or("")),
            format!("{:?}", entry.phase).to_lowercase(),
            doms.join(" ")
        ));
    }
    if session.phase() == Phase::Failed {
        return Err(Failure::Domain(value, format!("{text}session failed")));
    }
    Ok((value, text.trim_end().to_string()))
}

fn soft_edit(c: &Common, automaton: &Path, weights: &str, word: &str, approx: bool, mstar: Option<usize>) -> Outcome {
    let nfa = load_nfa(automaton)?;
    let weights = EditWeights::parse(weights)?;
    let sep = c.sep.as_deref();
    let w = parse_word(word, sep);
    let m = OpenEditMeasure::new(nfa, weights).with_budget(c.budget.unwrap_or(DEFAULT_SEARCH_BUDGET));
    let eval = m.evaluate(&w)?;
    if c.oracle {
        let closed = m.target().clone();
        let member = |v: &[_]| closed.accepts(v).unwrap_or(false);
        let cap = match eval.cost {
            Cost::Infinite => return Err(Failure::Oracle("no finite cap for an infinite measure".into())),
            finite => finite,
        };
        let brute = edit_distance_bruteforce(&member, closed.alphabet(), &weights, &w, cap, 10_000_000)?;
        if brute != eval.cost {
            return Err(Failure::Oracle(format!("search gives {} but brute force gives {brute}", eval.cost)));
        }
    }
    let status = contractibility_status(&weights, false);
    let mut value = json!({
        "m": eval.cost.to_string(),
        "script": eval.script,
        "contractibility": status,
    });
    let mut text = format!("m = {}", eval.cost);
    if approx {
        let a = approx_measures(&m, &w)?;
        for (k, v) in [("m1", a.m1), ("m2", a.m2), ("m3", a.m3), ("m4", a.m4), ("m5", a.m5)] {
            value[k] = json!(v.to_string());
            text.push_str(&format!("\n{k} = {v}"));
        }
    }
    if let Some(k) = mstar {
        let s = m_star_bounded(&m, &w, k)?;
        let status = serde_json::to_value(s.status).expect("status serializes");
        value["mstar"] = json!({"value": s.value.to_string(), "status": status, "ext": format_word(&s.ext, sep)});
        text.push_str(&format!(
            "\nmstar = {} ({}, extension `{}`)",
            s.value,
            status.as_str().unwrap_or(""),
            format_word(&s.ext, sep)
        ));
    }
    text.push_str(&format!("\ncontractibility: {}", serde_json::to_string(&status).expect("status serializes")));
    Ok((value, text))
}

#[allow(clippy::too_many_arguments)]
fn soft_decomp(
    c: &Common,
    name: &str,
    params: DecompParams,
    comb: &str,
    error: &str,
    weaken: bool,
    values: &[i64],
    analyze: bool,
) -> Outcome {
    let comb: Comb = comb.parse()?;
    let kind: ErrorKind = error.parse()?;
    let mut family = Family::new(name, &params)?;
    if weaken {
        family = family.weaken(drop_lower_bounds());
    }
    let d = family.at(values.len());
    let m = d.violation(comb, kind, values)?;
    let mut value = json!({
        "decomposition": family.name(),
        "weakened": weaken,
        "n": values.len(),
        "constraints": d.set.len(),
        "measure": m.to_string(),
    });
    let mut text = format!("measure = {m}");
    if analyze {
        let next = family.at(values.len() + 1);
        let covering = covering_check(&d, &next, c.budget.unwrap_or(DEFAULT_COVERING_BUDGET));
        let embedding = match natural_embedding(&d, &next) {
            Ok(e) => serde_json::to_value(semantic_embedding_check(&d, &next, &e, comb, kind, 6)?)
                .expect("verdicts serialize"),
            Err(e) => json!({"verdict": "fails", "reason": e.to_string()}),
        };
        let measure = |w: &[_]| family.measure(comb, kind, w);
        let mono = nondecreasing_bruteforce(&measure, &family.alphabet(), c.max_len)?;
        value["covering"] = serde_json::to_value(&covering).expect("verdicts serialize");
        value["embedding"] = embedding.clone();
        value["nondecreasing"] = verdict_json(&mono, Some(","));
        value["nondecreasing"]["checked_up_to"] = json!(c.max_len);
        text.push_str(&format!(
            "\ncovering {}->{}: {}\nnatural embedding: {}\nnon-decreasing up to length {}: {}",
            values.len(),
            values.len() + 1,
            value["covering"]["verdict"].as_str().unwrap_or(""),
            embedding["verdict"].as_str().unwrap_or(""),
            c.max_len,
            match &mono {
                ClosureVerdict::Holds => "holds".to_string(),
                ClosureVerdict::Fails { member, reduced } => format!(
                    "fails: `{}` scores below its prefix `{}`",
                    format_word(member, Some(",")),
                    format_word(reduced, Some(","))
                ),
            }
        ));
    }
    if c.oracle {
        let hard = family.constraint()?;
        let w: Vec<_> = values.iter().map(|&x| opencons::Symbol::int(x)).collect();
        if !weaken && m.is_zero() != hard.contains(&w) {
            return Err(Failure::Oracle("measure is not zero exactly on solutions".into()));
        }
    }
    Ok((value, text))
}

fn run(cli: Wrapper) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::AnalyzeAutomaton { file } => analyze_automaton(c, file),
        Command::PrefixClose { file } => prefix_close(c, file),
        Command::AnalyzeGrammar { file } => analyze_grammar(c, file),
        Command::PrefixCloseGrammar { file } => prefix_close_grammar(c, file),
        Command::CheckContractible { spec, direction } => check_contractible(c, spec, direction),
        Command::Propagate { scenario } => propagate(c, scenario),
        Command::SoftEdit { automaton, weights, word, approx, mstar } => {
            soft_edit(c, automaton, weights, word, *approx, *mstar)
        }
        Command::SoftDecomp { name, d, lower, upper, comb, error, weaken, values, analyze } => {
            let params = DecompParams { d: *d, lower: lower.clone(), upper: upper.clone() };
            soft_decomp(c, name, params, comb, error, *weaken, values, *analyze)
        }
    }
}

fn emit(json: bool, value: &Value, text: &str) {
    let body = if json { serde_json::to_string_pretty(value).expect("values print") } else { text.to_string() };
    // a closed pipe downstream is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{body}");
}

fn main() -> ExitCode {
    let cli = match Wrapper::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.common.json;
    match run(cli) {
        Ok((value, text)) => {
            emit(json, &value, &text);
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(value, text)) => {
            emit(json, &value, &text);
            ExitCode::from(1)
        }
        Err(Failure::Oracle(msg)) => {
            eprintln!("oracle mismatch: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Resource { .. } => 3,
                _ => 2,
            })
        }
    }
}
