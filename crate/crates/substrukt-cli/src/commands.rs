//! The subcommands, as thin adapters over the library.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;
use std::sync::mpsc;
use std::thread;

use serde_json::{json, Value};
use substrukt::algebra::{
    check_variety, derive_fl, derive_meet, derive_pseudocomplements, derive_residuals, enumerate_algebras, fixtures,
    satisfied_sigma, Family, FiniteAlgebra, VarietyId,
};
use substrukt::bridge::{
    all_filters, calculus_for, canonical_filter, countermodel, entails_semantically, filter_congruence_correspondence,
    relative_congruences, slice_closure_violations, BridgeError, Countermodel, CountermodelResult, SemanticVerdict,
    DEFAULT_TUPLE_LENGTH, MAX_CORRESPONDENCE_SIZE,
};
use substrukt::calculus::{check_proof, mirror_proof, parse_proof_sexp, rho_tau};
use substrukt::completion::{ideal_completion, show_subset, verify_embedding};
use substrukt::hilbert::{
    axioms_to_sequents, check_hilbert_proof, hfl_sigma, parse_hilbert_proof, preset, validate_rules, CrossCheckReport,
};
use substrukt::search::{prove_with_config, prove_with_hyps, SearchConfig, Verdict};
use substrukt::sequents::{mirror_sequent, parse_sequent, rho_prime, tau, tau_prime, Sequent};
use substrukt::syntax::{parse_formula, Formula};

use crate::output::{proof_text, Report, Status};
use crate::{CliError, Config, Derive};

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn read_source(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| CliError::NoInput { path: "<stdin>".into(), source })?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|source| CliError::NoInput { path: path.display().to_string(), source })
}

fn sequent(cfg: &Config, text: &str) -> Result<Sequent, CliError> {
    parse_sequent(text, &cfg.lang).map_err(|e| CliError::Data(format!("`{text}`: {e}")))
}

fn sequents(cfg: &Config, texts: &[String]) -> Result<BTreeSet<Sequent>, CliError> {
    texts.iter().map(|t| sequent(cfg, t)).collect()
}

fn header(cfg: &Config, command: &str, goal: &Sequent) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("sequent".into(), json!(goal.to_string()));
    m.insert("sigma".into(), json!(cfg.sigma.to_string()));
    m.insert("lang".into(), json!(cfg.lang.to_string()));
    m
}

/// `prove`: cut-free search, with hypotheses if any are given.
pub fn prove(cfg: &Config, text: &str, hyp_texts: &[String]) -> Result<Report, CliError> {
    let goal = sequent(cfg, text)?;
    let hyps = sequents(cfg, hyp_texts)?;
    let cal = cfg.calculus();
    let verdict = if hyps.is_empty() {
        prove_with_config(&goal, &cal, SearchConfig { bound: cfg.bound, ..SearchConfig::default() })
    } else {
        prove_with_hyps(&goal, &hyps, &cal, cfg.bound)
    };
    if let Verdict::Proved(t) = &verdict {
        check_proof(t, &cal, &hyps).map_err(|e| CliError::Data(format!("internal: search produced a bad proof: {e}")))?;
    }
    let mut json = header(cfg, "prove", &goal);
    json.insert("hypotheses".into(), json!(hyps.iter().map(|h| h.to_string()).collect::<Vec<_>>()));
    json.insert("verdict".into(), json!(verdict.label()));
    let (status, text, sexp) = match &verdict {
        Verdict::Proved(t) => {
            json.insert("proof".into(), json!(t.to_sexp()));
            (Status::Valid, format!("proved\n{}", proof_text(t)), Some(t.to_sexp()))
        }
        Verdict::Refuted { caveat } => {
            json.insert("caveat".into(), json!(caveat));
            let note = if *caveat { " (relies on the contraction loop check)" } else { "" };
            (Status::Invalid, format!("refuted{note}\n"), None)
        }
        Verdict::Unknown { bound } => {
            json.insert("bound".into(), json!(bound));
            (Status::Unknown, format!("unknown (depth bound {bound})\n"), None)
        }
    };
    Ok(Report { status, text, json: Value::Object(json), sexp })
}

enum Finding {
    Search(Verdict),
    Model(Result<Option<Countermodel>, BridgeError>),
}

/// `decide`: proof search and countermodel search run on separate threads;
/// the first definitive answer wins. A refutation by the prover waits for
/// the model search so that a countermodel can be reported when one exists,
/// which keeps the output independent of thread timing.
pub fn decide(cfg: &Config, text: &str, hyp_texts: &[String]) -> Result<Report, CliError> {
    let goal = sequent(cfg, text)?;
    let hyps = sequents(cfg, hyp_texts)?;
    let cal = cfg.calculus();
    let variety = VarietyId::for_calculus(&cal);
    let (tx, rx) = mpsc::channel();
    {
        let (tx, goal, hyps, bound) = (tx.clone(), goal.clone(), hyps.clone(), cfg.bound);
        thread::spawn(move || {
            let v = if hyps.is_empty() {
                prove_with_config(&goal, &cal, SearchConfig { bound, ..SearchConfig::default() })
            } else {
                prove_with_hyps(&goal, &hyps, &cal, bound)
            };
            let _ = tx.send(Finding::Search(v));
        });
    }
    {
        let (goal, hyps, n) = (goal.clone(), hyps.clone(), cfg.max_size);
        thread::spawn(move || {
            let r = if hyps.is_empty() {
                countermodel(&goal, &variety, n).map(|r| match r {
                    CountermodelResult::Found(w) => Some(w),
                    CountermodelResult::NotFound => None,
                })
            } else {
                entails_semantically(&hyps, &goal, &variety, n).map(|r| match r {
                    SemanticVerdict::Refuted(w) => Some(w),
                    SemanticVerdict::NoCountermodelUpTo { .. } => None,
                })
            };
            let _ = tx.send(Finding::Model(r));
        });
    }

    let mut search: Option<Verdict> = None;
    let mut model_done = false;
    let outcome = loop {
        match rx.recv().map_err(|_| CliError::Data("internal: a search thread died".into()))? {
            Finding::Search(Verdict::Proved(t)) => break Verdict::Proved(t).into(),
            Finding::Search(v) => search = Some(v),
            Finding::Model(Err(e)) => return Err(data(e)),
            Finding::Model(Ok(Some(w))) => break Outcome::Model(w),
            Finding::Model(Ok(None)) => model_done = true,
        }
        if model_done {
            if let Some(v) = search.take() {
                break v.into();
            }
        }
    };

    let mut json = header(cfg, "decide", &goal);
    json.insert("hypotheses".into(), json!(hyps.iter().map(|h| h.to_string()).collect::<Vec<_>>()));
    let (status, text, sexp) = match outcome {
        Outcome::Search(Verdict::Proved(t)) => {
            check_proof(&t, &cal, &hyps).map_err(|e| CliError::Data(format!("internal: bad proof: {e}")))?;
            json.insert("verdict".into(), json!("proved"));
            json.insert("proof".into(), json!(t.to_sexp()));
            (Status::Valid, format!("proved\n{}", proof_text(&t)), Some(t.to_sexp()))
        }
        Outcome::Model(w) => {
            json.insert("verdict".into(), json!("refuted"));
            json.insert("countermodel".into(), w.to_json());
            (Status::Invalid, format!("refuted\ncountermodel:\n{w}"), None)
        }
        Outcome::Search(Verdict::Refuted { caveat }) => {
            json.insert("verdict".into(), json!("refuted"));
            json.insert("caveat".into(), json!(caveat));
            json.insert("countermodel".into(), Value::Null);
            json.insert("max_size".into(), json!(cfg.max_size));
            let text = format!("refuted by exhaustive proof search; no countermodel with at most {} elements\n", cfg.max_size);
            (Status::Invalid, text, None)
        }
        Outcome::Search(Verdict::Unknown { bound }) => {
            json.insert("verdict".into(), json!("unknown"));
            json.insert("bound".into(), json!(bound));
            json.insert("max_size".into(), json!(cfg.max_size));
            let text = format!("unknown (depth bound {bound}; no countermodel with at most {} elements)\n", cfg.max_size);
            (Status::Unknown, text, None)
        }
    };
    Ok(Report { status, text, json: Value::Object(json), sexp })
}

enum Outcome {
    Search(Verdict),
    Model(Countermodel),
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Outcome {
        Outcome::Search(v)
    }
}

/// `translate`: the equation of a sequent and its sequent translation, or the
/// sequent of a formula.
pub fn translate(cfg: &Config, input: &str, as_formula: bool) -> Result<Report, CliError> {
    if as_formula {
        let f = parse_formula(input, &cfg.lang).map_err(|e| CliError::Data(format!("`{input}`: {e}")))?;
        let s = rho_prime(&f);
        let json = json!({ "command": "translate", "formula": f.to_string(), "sequent": s.to_string() });
        return Ok(Report { status: Status::Valid, text: format!("{s}\n"), json, sexp: None });
    }
    let s = sequent(cfg, input)?;
    let eqs: Vec<String> = tau(&s).iter().map(|e| e.to_string()).collect();
    let back: Vec<String> = rho_tau(&s).iter().map(|x| x.to_string()).collect();
    let formula = tau_prime(&s);
    let mut text = String::new();
    for e in &eqs {
        text.push_str(&format!("equation: {e}\n"));
    }
    text.push_str(&format!("formula:  {formula}\n"));
    for b in &back {
        text.push_str(&format!("back:     {b}\n"));
    }
    let json = json!({
        "command": "translate",
        "sequent": s.to_string(),
        "equations": eqs,
        "formula": formula.to_string(),
        "back": back,
    });
    Ok(Report { status: Status::Valid, text, json, sexp: None })
}

/// `mirror`: the mirror image of a sequent, or of a proof read from a file.
pub fn mirror(cfg: &Config, seq: Option<&str>, proof: Option<&Path>) -> Result<Report, CliError> {
    match (seq, proof) {
        (Some(text), None) => {
            let s = sequent(cfg, text)?;
            let m = mirror_sequent(&s);
            let json = json!({ "command": "mirror", "sequent": s.to_string(), "mirror": m.to_string() });
            Ok(Report { status: Status::Valid, text: format!("{m}\n"), json, sexp: None })
        }
        (None, Some(path)) => {
            let t = parse_proof_sexp(&read_source(path)?, &cfg.lang).map_err(data)?;
            let m = mirror_proof(&t);
            let json = json!({
                "command": "mirror",
                "sequent": t.conclusion.to_string(),
                "mirror": m.conclusion.to_string(),
                "proof": m.to_sexp(),
            });
            Ok(Report { status: Status::Valid, text: proof_text(&m), json, sexp: Some(m.to_sexp()) })
        }
        _ => Err(CliError::Usage("mirror takes either a sequent or --proof FILE".into())),
    }
}

fn fixture(name: &str) -> Option<FiniteAlgebra> {
    Some(match name {
        "two-chain" => fixtures::two_chain(),
        "four-chain" => fixtures::four_chain(),
        "five-chain-pseudo" => fixtures::five_chain_pseudo(),
        "diamond" => fixtures::diamond(),
        "three-chain-nilpotent" => fixtures::three_chain_nilpotent(),
        _ => return None,
    })
}

fn load_algebra(source: &str) -> Result<FiniteAlgebra, CliError> {
    if let Some(name) = source.strip_prefix("fixture:") {
        return fixture(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown fixture `{name}` (two-chain, four-chain, five-chain-pseudo, diamond, three-chain-nilpotent)"
            ))
        });
    }
    FiniteAlgebra::from_json_str(&read_source(Path::new(source))?).map_err(data)
}

fn family_of(a: &FiniteAlgebra, name: Option<&str>) -> Result<Family, CliError> {
    match name {
        Some(n) => Family::parse(n).ok_or_else(|| CliError::Usage(format!("unknown family `{n}`"))),
        None => Ok(Family::for_language(a.language())),
    }
}

/// `algebra`: check a finite algebra against `family_σ`.
pub fn algebra(cfg: &Config, source: &str, family: Option<&str>, derive: Option<Derive>) -> Result<Report, CliError> {
    let mut a = load_algebra(source)?;
    a = match derive {
        None => a,
        Some(Derive::Meet) => derive_meet(&a).map_err(data)?,
        Some(Derive::Residuals) => derive_residuals(&a).map_err(data)?,
        Some(Derive::Negations) => derive_pseudocomplements(&a).map_err(data)?,
        Some(Derive::Fl) => derive_fl(&a).map_err(data)?,
    };
    let v = VarietyId::new(family_of(&a, family)?, cfg.sigma);
    let report = check_variety(&a, &v).map_err(data)?;
    let mut text = format!("{a}");
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|x| json!({ "name": x.name, "equation": x.equation.to_string(), "witness": x.witness }))
        .collect();
    if report.holds() {
        text.push_str(&format!("in {v}\n"));
    } else {
        text.push_str(&format!("not in {v}\n"));
        for x in &report.violations {
            let w: Vec<String> = x.witness.iter().map(|(k, e)| format!("{k} = {e}")).collect();
            text.push_str(&format!("  {}: {}  at {}\n", x.name, x.equation, w.join(", ")));
        }
    }
    let json = json!({
        "command": "algebra",
        "variety": v.to_string(),
        "holds": report.holds(),
        "violations": violations,
        "satisfied_sigma": satisfied_sigma(&a).to_string(),
        "algebra": a.to_json(),
    });
    Ok(Report { status: Status::from_bool(report.holds()), text, json, sexp: None })
}

/// `complete`: the ideal completion and the checks on its embedding.
pub fn complete(source: &str) -> Result<Report, CliError> {
    let a = load_algebra(source)?;
    let c = ideal_completion(&a).map_err(data)?;
    let report = verify_embedding(&a, &c);
    let sets: Vec<String> = c.sets.iter().map(|&s| show_subset(&a, s)).collect();
    let mut text = format!("{}", c.algebra);
    for (i, s) in sets.iter().enumerate() {
        text.push_str(&format!("{} = {s}\n", c.algebra.name(i)));
    }
    text.push_str(&format!("{report}"));
    let json = json!({
        "command": "complete",
        "algebra": c.algebra.to_json(),
        "sets": sets,
        "embedding": c.embedding,
        "checks": report.checks.iter().map(|(n, ok)| json!({ "check": n, "passed": ok })).collect::<Vec<_>>(),
        "failures": report.failures,
    });
    Ok(Report { status: Status::from_bool(report.passed()), text, json, sexp: None })
}

/// `filters`: filter count, canonical filter closure, and the filter–congruence
/// correspondence for small carriers.
pub fn filters(cfg: &Config, source: &str, family: Option<&str>) -> Result<Report, CliError> {
    let a = load_algebra(source)?;
    let v = VarietyId::new(family_of(&a, family)?, cfg.sigma);
    let cal = calculus_for(&v);
    let canon = canonical_filter(&a);
    let violations: Vec<String> =
        slice_closure_violations(&a, &canon, &cal, DEFAULT_TUPLE_LENGTH, 10).iter().map(|x| x.show(&a)).collect();
    let filters = all_filters(&a, &cal, DEFAULT_TUPLE_LENGTH).len();
    let congruences = relative_congruences(&a, &v).len();
    let correspondence = if a.size() <= MAX_CORRESPONDENCE_SIZE {
        Some(filter_congruence_correspondence(&a, &v).map_err(data)?)
    } else {
        None
    };
    let mut text = format!("variety: {v}\nfilters: {filters}\nrelative congruences: {congruences}\n");
    if violations.is_empty() {
        text.push_str("canonical filter: closed\n");
    } else {
        text.push_str("canonical filter: not closed\n");
        for x in &violations {
            text.push_str(&format!("  {x}\n"));
        }
    }
    match &correspondence {
        Some(r) if r.holds() => text.push_str("correspondence: order isomorphism\n"),
        Some(r) => {
            text.push_str("correspondence: fails\n");
            for f in &r.failures {
                text.push_str(&format!("  {f}\n"));
            }
        }
        None => text.push_str("correspondence: not checked (carrier too large)\n"),
    }
    let ok = violations.is_empty() && correspondence.as_ref().is_none_or(|r| r.holds());
    let json = json!({
        "command": "filters",
        "variety": v.to_string(),
        "filters": filters,
        "congruences": congruences,
        "canonical_violations": violations,
        "correspondence": correspondence.map(|r| json!({ "holds": r.holds(), "failures": r.failures })),
    });
    Ok(Report { status: Status::from_bool(ok), text, json, sexp: None })
}

/// `enumerate`: all algebras of `family_σ` of the given size, up to isomorphism.
pub fn enumerate(cfg: &Config, family: &str, size: Option<usize>) -> Result<Report, CliError> {
    let fam = Family::parse(family).ok_or_else(|| CliError::Usage(format!("unknown family `{family}`")))?;
    let n = size.unwrap_or(cfg.max_size);
    let v = VarietyId::new(fam, cfg.sigma);
    let all = enumerate_algebras(&v, n).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut text = format!("{} algebra(s) of size {n} in {v}\n", all.len());
    for (i, a) in all.iter().enumerate() {
        text.push_str(&format!("\n#{}\n{a}", i + 1));
    }
    let json = json!({
        "command": "enumerate",
        "variety": v.to_string(),
        "size": n,
        "count": all.len(),
        "algebras": all.iter().map(FiniteAlgebra::to_json).collect::<Vec<_>>(),
    });
    Ok(Report { status: Status::Valid, text, json, sexp: None })
}

fn cross_json(r: &CrossCheckReport) -> Vec<Value> {
    r.rows
        .iter()
        .map(|row| json!({ "name": row.name, "goal": row.goal.to_string(), "verdict": row.verdict.label() }))
        .collect()
}

/// `hilbert`: check a proof in the line format, or cross-check the system's
/// axioms and rules against the sequent calculus.
pub fn hilbert(cfg: &Config, proof: Option<&Path>, system: &str, hyp_texts: &[String]) -> Result<Report, CliError> {
    let sys = match system {
        "hfl" => hfl_sigma(cfg.sigma),
        other => preset(other).ok_or_else(|| CliError::Usage(format!("unknown system `{other}` (hfl, hfl-e, var)")))?,
    };
    if let Some(path) = proof {
        let p = parse_hilbert_proof(&read_source(path)?, &sys.lang).map_err(data)?;
        let hyps: BTreeSet<Formula> = hyp_texts
            .iter()
            .map(|t| parse_formula(t, &sys.lang).map_err(|e| CliError::Data(format!("`{t}`: {e}"))))
            .collect::<Result<_, _>>()?;
        let result = check_hilbert_proof(&p, &sys, &hyps);
        let conclusion = p.lines.last().map(|l| l.formula.to_string());
        let text = match &result {
            Ok(()) => format!("valid proof of {} in {}\n", conclusion.as_deref().unwrap_or("nothing"), sys.name),
            Err(e) => format!("invalid: {e}\n"),
        };
        let json = json!({
            "command": "hilbert",
            "system": sys.name,
            "valid": result.is_ok(),
            "conclusion": conclusion,
            "error": result.as_ref().err().map(|e| e.to_string()),
        });
        return Ok(Report { status: Status::from_bool(result.is_ok()), text, json, sexp: None });
    }
    let cal = sys.calculus();
    let axioms = axioms_to_sequents(&sys, &cal);
    let rules = validate_rules(&sys, &cal, cfg.bound);
    let rows = axioms.rows.iter().chain(&rules.rows);
    let status = if rows.clone().any(|r| r.verdict.is_refuted()) {
        Status::Invalid
    } else if rows.clone().all(|r| r.verdict.is_proved()) {
        Status::Valid
    } else {
        Status::Unknown
    };
    let text = format!("{} against {cal}\naxioms:\n{axioms}rules:\n{rules}", sys.name);
    let json = json!({
        "command": "hilbert",
        "system": sys.name,
        "calculus": cal.to_string(),
        "axioms": cross_json(&axioms),
        "rules": cross_json(&rules),
    });
    Ok(Report { status, text, json, sexp: None })
}
