//! Hilbert-style presentations of the logics: axiom schemata and rules,
//! proof checking, a line-oriented proof format, and cross-validation of the
//! axioms and rules against the sequent prover.
//!
//! Every variable in a schema is a metavariable. Object variables appear only
//! in instances. The presets spell metavariables `phi`, `psi`, `chi`.
//!
//! The proof format has one line per step:
//!
//! ```text
//! 1. p  hyp
//! 2. p \ q  hyp
//! 3. q  mp 1 2
//! 4. q \ q  axiom id
//! ```
//!
//! ```
//! use std::collections::BTreeSet;
//! use substrukt::hilbert::{check_hilbert_proof, hfl, parse_hilbert_proof};
//! use substrukt::syntax::{parse_formula, Language};
//!
//! let sys = hfl();
//! let proof = parse_hilbert_proof("1. p\n2. p \\ q  hyp\n3. q  mp 1 2\n", &sys.lang);
//! assert!(proof.is_err()); // line 1 has no justification
//!
//! let proof = parse_hilbert_proof("1. p  hyp\n2. p \\ q  hyp\n3. q  mp 1 2\n", &sys.lang).unwrap();
//! let l = Language::full();
//! let hyps: BTreeSet<_> = ["p", "p \\ q"].iter().map(|s| parse_formula(s, &l).unwrap()).collect();
//! assert!(check_hilbert_proof(&proof, &sys, &hyps).is_ok());
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::calculus::{CalculusId, Sigma};
use crate::search::{prove, prove_with_hyps, Verdict};
use crate::sequents::{rho_prime, Sequent};
use crate::syntax::{apply_subst, parse_formula, Connective, Formula, Language, ParseError, Substitution};

/// A named axiom schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomSchema {
    /// Name used in proofs.
    pub name: String,
    /// The schema; all its variables are metavariables.
    pub schema: Formula,
}

/// A named rule schema `⟨premises, conclusion⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSchema {
    /// Name used in proofs.
    pub name: String,
    /// Premise schemata.
    pub premises: Vec<Formula>,
    /// Conclusion schema.
    pub conclusion: Formula,
}

/// A Hilbert system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSystem {
    /// Display name.
    pub name: String,
    /// The language of the system.
    pub lang: Language,
    /// The structural rules of the matching sequent calculus.
    pub sigma: Sigma,
    /// Axiom schemata.
    pub axioms: Vec<AxiomSchema>,
    /// Rules.
    pub rules: Vec<RuleSchema>,
}

impl HilbertSystem {
    /// The axiom schema with this name.
    pub fn axiom(&self, name: &str) -> Option<&AxiomSchema> {
        self.axioms.iter().find(|a| a.name == name)
    }

    /// The rule with this name.
    pub fn rule(&self, name: &str) -> Option<&RuleSchema> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// The sequent calculus whose external system this presents.
    pub fn calculus(&self) -> CalculusId {
        CalculusId::new(self.sigma, Language::full())
    }

    fn add_axiom(&mut self, name: &str, text: &str) {
        let schema = parse_formula(text, &Language::full()).unwrap_or_else(|e| panic!("preset schema {name}: {e}"));
        self.axioms.push(AxiomSchema { name: name.to_string(), schema });
    }

    fn add_rule(&mut self, name: &str, premises: &[&str], conclusion: &str) {
        let p = |t: &str| parse_formula(t, &Language::full()).unwrap_or_else(|e| panic!("preset rule {name}: {e}"));
        self.rules.push(RuleSchema {
            name: name.to_string(),
            premises: premises.iter().map(|t| p(t)).collect(),
            conclusion: p(conclusion),
        });
    }
}

fn lang(conns: &[Connective]) -> Language {
    Language::new(conns.iter().copied()).expect("preset language")
}

/// The non-commutative system in the full language `⟨∨, ∧, *, \, /, rn, ln, 0, 1⟩`,
/// including the schemata defining both negations.
///
/// The prefixing axiom is `(φ\ψ)\((γ\φ)\(γ\ψ))`.
pub fn hfl() -> HilbertSystem {
    let mut s = HilbertSystem {
        name: "HFL".into(),
        lang: Language::full(),
        sigma: Sigma::empty(),
        axioms: Vec::new(),
        rules: Vec::new(),
    };
    s.add_axiom("id", r"phi \ phi");
    s.add_axiom("pf", r"(phi \ psi) \ ((chi \ phi) \ (chi \ psi))");
    s.add_axiom("as", r"phi \ ((psi / phi) \ psi)");
    s.add_axiom("a", r"((psi \ chi) / phi) \ (psi \ (chi / phi))");
    s.add_axiom("fus-res", r"((psi * (psi \ phi)) / psi) \ (phi / psi)");
    s.add_axiom("fus-meet", r"((phi /\ 1) * (psi /\ 1)) \ (phi /\ psi)");
    s.add_axiom("meet-1", r"(phi /\ psi) \ phi");
    s.add_axiom("meet-2", r"(phi /\ psi) \ psi");
    s.add_axiom("imp-meet", r"((chi \ phi) /\ (chi \ psi)) \ (chi \ (phi /\ psi))");
    s.add_axiom("join-1", r"phi \ (phi \/ psi)");
    s.add_axiom("join-2", r"psi \ (phi \/ psi)");
    s.add_axiom("join-imp", r"((phi \ chi) /\ (psi \ chi)) \ ((phi \/ psi) \ chi)");
    s.add_axiom("imp-fus", r"psi \ (phi \ (phi * psi))");
    s.add_axiom("fus-imp", r"(psi \ (phi \ chi)) \ ((phi * psi) \ chi)");
    s.add_axiom("unit", "1");
    s.add_axiom("unit-imp", r"1 \ (phi \ phi)");
    s.add_axiom("imp-unit", r"phi \ (1 \ phi)");
    s.add_axiom("rn-def-1", r"rn(phi) \ (phi \ 0)");
    s.add_axiom("rn-def-2", r"(phi \ 0) \ rn(phi)");
    s.add_axiom("ln-def-1", r"ln(phi) / (0 / phi)");
    s.add_axiom("ln-def-2", r"(0 / phi) / ln(phi)");
    s.add_rule("mp", &["phi", r"phi \ psi"], "psi");
    s.add_rule("adj-u", &["phi"], r"phi /\ 1");
    s.add_rule("pn-r", &["phi"], r"psi \ (phi * psi)");
    s.add_rule("pn-l", &["phi"], r"(psi * phi) / psi");
    s
}

fn commutative_language() -> Language {
    use Connective::*;
    lang(&[Join, Meet, Fus, Rimp, Rneg, Zero, One])
}

/// The commutative system in `⟨∨, ∧, *, →, ¬, 0, 1⟩`, with `→` written `\`
/// and `¬` written `rn`, including the schemata defining the negation.
pub fn hfl_e() -> HilbertSystem {
    let mut s = HilbertSystem {
        name: "HFLe".into(),
        lang: commutative_language(),
        sigma: Sigma { e: true, ..Sigma::empty() },
        axioms: Vec::new(),
        rules: Vec::new(),
    };
    s.add_axiom("id", r"phi \ phi");
    s.add_axiom("pf", r"(phi \ psi) \ ((chi \ phi) \ (chi \ psi))");
    s.add_axiom("per", r"(phi \ (psi \ chi)) \ (psi \ (phi \ chi))");
    s.add_axiom("fus-meet", r"((phi /\ 1) * (psi /\ 1)) \ (phi /\ psi)");
    s.add_axiom("meet-1", r"(phi /\ psi) \ phi");
    s.add_axiom("meet-2", r"(phi /\ psi) \ psi");
    s.add_axiom("imp-meet", r"((chi \ phi) /\ (chi \ psi)) \ (chi \ (phi /\ psi))");
    s.add_axiom("join-1", r"phi \ (phi \/ psi)");
    s.add_axiom("join-2", r"psi \ (phi \/ psi)");
    s.add_axiom("join-imp", r"((phi \ chi) /\ (psi \ chi)) \ ((phi \/ psi) \ chi)");
    s.add_axiom("imp-fus", r"psi \ (phi \ (phi * psi))");
    s.add_axiom("fus-imp", r"(psi \ (phi \ chi)) \ ((phi * psi) \ chi)");
    s.add_axiom("unit", "1");
    s.add_axiom("unit-imp", r"1 \ (phi \ phi)");
    s.add_axiom("neg-def-1", r"rn(phi) \ (phi \ 0)");
    s.add_axiom("neg-def-2", r"(phi \ 0) \ rn(phi)");
    s.add_rule("mp", &["phi", r"phi \ psi"], "psi");
    s.add_rule("adj-u", &["phi"], r"phi /\ 1");
    s
}

/// The strongly separable presentation of the commutative system in
/// `⟨∨, ∧, *, →, 0, 1⟩` (with `→` written `\`), with the rules `dis` and `adj`
/// in place of the lattice axioms and `adj-u`.
pub fn van_alten_raftery() -> HilbertSystem {
    use Connective::*;
    let mut s = HilbertSystem {
        name: "vAR".into(),
        lang: lang(&[Join, Meet, Fus, Rimp, Zero, One]),
        sigma: Sigma { e: true, ..Sigma::empty() },
        axioms: Vec::new(),
        rules: Vec::new(),
    };
    s.add_axiom("id", r"phi \ phi");
    s.add_axiom("pf", r"(phi \ psi) \ ((chi \ phi) \ (chi \ psi))");
    s.add_axiom("per", r"(phi \ (psi \ chi)) \ (psi \ (phi \ chi))");
    s.add_axiom("join-1", r"phi \ (phi \/ psi)");
    s.add_axiom("join-2", r"psi \ (phi \/ psi)");
    s.add_axiom("meet-1", r"(phi /\ psi) \ phi");
    s.add_axiom("meet-2", r"(phi /\ psi) \ psi");
    s.add_axiom("imp-meet", r"((chi \ phi) /\ (chi \ psi)) \ (chi \ (phi /\ psi))");
    s.add_axiom("fus-imp", r"(psi \ (phi \ chi)) \ ((phi * psi) \ chi)");
    s.add_axiom("imp-fus", r"psi \ (phi \ (phi * psi))");
    s.add_axiom("unit", "1");
    s.add_axiom("unit-imp", r"1 \ (phi \ phi)");
    s.add_rule("mp", &["phi", r"phi \ psi"], "psi");
    s.add_rule("dis", &[r"phi \ chi", r"psi \ chi"], r"(phi \/ psi) \ chi");
    s.add_rule("adj", &["phi", "psi"], r"phi /\ psi");
    s
}

/// The schemata for the structural rules of `sigma` other than exchange.
pub fn sigma_schemata(sigma: Sigma) -> Vec<AxiomSchema> {
    let mut out = Vec::new();
    let mut add = |on: bool, name: &str, text: &str| {
        if on {
            out.push(AxiomSchema { name: name.into(), schema: parse_formula(text, &Language::full()).expect("schema") });
        }
    };
    add(sigma.wl, "wl", r"phi \ (psi \ phi)");
    add(sigma.wr, "wr", r"0 \ phi");
    add(sigma.c, "c", r"(phi \ (phi \ psi)) \ (phi \ psi)");
    out
}

/// The base system (the commutative one when `e ∈ σ`) extended by the
/// schemata of `sigma`.
pub fn hfl_sigma(sigma: Sigma) -> HilbertSystem {
    let mut s = if sigma.e { hfl_e() } else { hfl() };
    s.axioms.extend(sigma_schemata(sigma));
    s.sigma = sigma;
    if sigma != Sigma::empty() && sigma != (Sigma { e: true, ..Sigma::empty() }) {
        s.name = format!("{}{{{}}}", if sigma.e { "HFLe" } else { "HFL" }, sigma);
    }
    s
}

/// Extends `s` by matching `schema` against `f`. Returns `false` on a clash.
pub fn match_schema(schema: &Formula, f: &Formula, s: &mut Substitution) -> bool {
    match (schema, f) {
        (Formula::Var(v), _) => match s.get(v) {
            Some(bound) => bound == f,
            None => {
                s.insert(v.clone(), f.clone());
                true
            }
        },
        (Formula::Zero, Formula::Zero) | (Formula::One, Formula::One) => true,
        (Formula::Bin(o1, a1, b1), Formula::Bin(o2, a2, b2)) => o1 == o2 && match_schema(a1, a2, s) && match_schema(b1, b2, s),
        (Formula::Un(o1, a1), Formula::Un(o2, a2)) => o1 == o2 && match_schema(a1, a2, s),
        _ => false,
    }
}

/// How a proof line is justified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// An instance of a named axiom schema. The substitution is recomputed
    /// by matching when absent.
    Axiom {
        /// Axiom name.
        name: String,
        /// Optional explicit substitution for the metavariables.
        subst: Option<Substitution>,
    },
    /// A hypothesis.
    Hypothesis,
    /// A rule applied to earlier lines (1-based).
    Rule {
        /// Rule name.
        name: String,
        /// Premise line numbers, in the rule's premise order.
        premises: Vec<usize>,
    },
}

/// One proof line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertLine {
    /// The formula derived.
    pub formula: Formula,
    /// Its justification.
    pub justification: Justification,
}

/// A Hilbert proof: a sequence of justified formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HilbertProof {
    /// The lines; line `n` in the text format is `lines[n - 1]`.
    pub lines: Vec<HilbertLine>,
}

impl fmt::Display for HilbertProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lines.iter().enumerate() {
            write!(f, "{}. {}  ", i + 1, l.formula)?;
            match &l.justification {
                Justification::Axiom { name, .. } => writeln!(f, "axiom {name}")?,
                Justification::Hypothesis => writeln!(f, "hyp")?,
                Justification::Rule { name, premises } => {
                    let ps: Vec<String> = premises.iter().map(|p| p.to_string()).collect();
                    writeln!(f, "{name} {}", ps.join(" "))?
                }
            }
        }
        Ok(())
    }
}

/// Why a proof was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertError {
    /// The formula is not an instance of the cited schema, or the premises
    /// do not fit the rule.
    #[error("bad-instance at line {line}")]
    BadInstance {
        /// 1-based line number.
        line: usize,
    },
    /// A premise index does not point to an earlier line.
    #[error("bad-index at line {line}: {index} is not an earlier line")]
    BadIndex {
        /// 1-based line number.
        line: usize,
        /// The offending index.
        index: usize,
    },
    /// The rule is not part of the system.
    #[error("unknown-rule `{name}` at line {line}")]
    UnknownRule {
        /// 1-based line number.
        line: usize,
        /// The name cited.
        name: String,
    },
    /// The axiom is not part of the system.
    #[error("unknown-axiom `{name}` at line {line}")]
    UnknownAxiom {
        /// 1-based line number.
        line: usize,
        /// The name cited.
        name: String,
    },
    /// A line cites a hypothesis that was not declared.
    #[error("hypothesis-not-declared at line {line}")]
    HypothesisNotDeclared {
        /// 1-based line number.
        line: usize,
    },
    /// The formula uses a connective outside the system's language.
    #[error("not-in-language at line {line}")]
    NotInLanguage {
        /// 1-based line number.
        line: usize,
    },
}

/// Accepts iff every line is a declared hypothesis, an instance of a named
/// axiom, or follows from earlier lines by a named rule under one
/// substitution.
pub fn check_hilbert_proof(p: &HilbertProof, sys: &HilbertSystem, hyps: &BTreeSet<Formula>) -> Result<(), HilbertError> {
    for (i, l) in p.lines.iter().enumerate() {
        let line = i + 1;
        if !l.formula.is_in(sys.lang) {
            return Err(HilbertError::NotInLanguage { line });
        }
        match &l.justification {
            Justification::Hypothesis => {
                if !hyps.contains(&l.formula) {
                    return Err(HilbertError::HypothesisNotDeclared { line });
                }
            }
            Justification::Axiom { name, subst } => {
                let ax = sys.axiom(name).ok_or_else(|| HilbertError::UnknownAxiom { line, name: name.clone() })?;
                let ok = match subst {
                    Some(s) => apply_subst(s, &ax.schema) == l.formula,
                    None => match_schema(&ax.schema, &l.formula, &mut Substitution::new()),
                };
                if !ok {
                    return Err(HilbertError::BadInstance { line });
                }
            }
            Justification::Rule { name, premises } => {
                let rule = sys.rule(name).ok_or_else(|| HilbertError::UnknownRule { line, name: name.clone() })?;
                if let Some(&index) = premises.iter().find(|&&k| k == 0 || k >= line) {
                    return Err(HilbertError::BadIndex { line, index });
                }
                if premises.len() != rule.premises.len() {
                    return Err(HilbertError::BadInstance { line });
                }
                let mut s = Substitution::new();
                let ok = rule.premises.iter().zip(premises).all(|(schema, &k)| match_schema(schema, &p.lines[k - 1].formula, &mut s))
                    && match_schema(&rule.conclusion, &l.formula, &mut s);
                if !ok {
                    return Err(HilbertError::BadInstance { line });
                }
            }
        }
    }
    Ok(())
}

/// Errors in the line-oriented proof format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertParseError {
    /// A line does not have the shape `n. <formula> <justification>`.
    #[error("line {line}: {msg}")]
    Malformed {
        /// 1-based line of the text.
        line: usize,
        /// What went wrong.
        msg: String,
    },
    /// The formula does not parse.
    #[error("line {line}: {err}")]
    Formula {
        /// 1-based line of the text.
        line: usize,
        /// The parser's error.
        err: ParseError,
    },
}

/// Parses `n. <formula> <justification>` lines, where the justification is
/// `hyp`, `axiom <name>` or `<rule> m1 m2 …`. Blank lines and lines starting
/// with `#` are skipped. Line numbers must run 1, 2, ….
pub fn parse_hilbert_proof(text: &str, lang: &Language) -> Result<HilbertProof, HilbertParseError> {
    let mut proof = HilbertProof::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| HilbertParseError::Malformed { line, msg: msg.into() };
        let (num, rest) = t.split_once('.').ok_or_else(|| bad("expected `n.`"))?;
        let n: usize = num.trim().parse().map_err(|_| bad("expected a line number"))?;
        if n != proof.lines.len() + 1 {
            return Err(bad(&format!("expected line number {}", proof.lines.len() + 1)));
        }
        let words: Vec<&str> = rest.split_whitespace().collect();
        let digits = words.iter().rev().take_while(|w| w.chars().all(|c| c.is_ascii_digit())).count();
        let (formula_words, justification) = if words.last() == Some(&"hyp") {
            (&words[..words.len() - 1], Justification::Hypothesis)
        } else if words.len() >= 2 && words[words.len() - 2] == "axiom" {
            (&words[..words.len() - 2], Justification::Axiom { name: words[words.len() - 1].to_string(), subst: None })
        } else if digits > 0 && words.len() > digits + 1 {
            let k = words.len() - digits - 1;
            let premises = words[k + 1..].iter().map(|w| w.parse().expect("digits")).collect();
            (&words[..k], Justification::Rule { name: words[k].to_string(), premises })
        } else {
            return Err(bad("expected `hyp`, `axiom <name>` or `<rule> <lines>`"));
        };
        if formula_words.is_empty() {
            return Err(bad("missing formula"));
        }
        let formula =
            parse_formula(&formula_words.join(" "), lang).map_err(|err| HilbertParseError::Formula { line, err })?;
        proof.lines.push(HilbertLine { formula, justification });
    }
    Ok(proof)
}

/// Replaces the metavariables of a schema, in order of first appearance, by
/// `p`, `q`, `r`, `s`, ….
fn fresh_instance_subst(formulas: &[&Formula]) -> Substitution {
    let mut order: Vec<String> = Vec::new();
    fn walk(f: &Formula, out: &mut Vec<String>) {
        match f {
            Formula::Var(v) if !out.contains(v) => out.push(v.clone()),
            Formula::Bin(_, a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Formula::Un(_, a) => walk(a, out),
            _ => {}
        }
    }
    for f in formulas {
        walk(f, &mut order);
    }
    const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
    order.into_iter().enumerate().map(|(i, v)| (v, Formula::var(NAMES[i]))).collect()
}

/// One row of a cross-validation report.
#[derive(Clone, Debug)]
pub struct CrossCheckRow {
    /// Axiom or rule name.
    pub name: String,
    /// The hypotheses (empty for axioms).
    pub hyps: BTreeSet<Sequent>,
    /// The sequent that was searched for.
    pub goal: Sequent,
    /// The prover's verdict.
    pub verdict: Verdict,
}

/// A cross-validation report.
#[derive(Clone, Debug, Default)]
pub struct CrossCheckReport {
    /// One row per axiom or rule.
    pub rows: Vec<CrossCheckRow>,
}

impl CrossCheckReport {
    /// Whether every row was proved.
    pub fn all_proved(&self) -> bool {
        self.rows.iter().all(|r| r.verdict.is_proved())
    }

    /// Names of the rows not proved.
    pub fn unproved(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| !r.verdict.is_proved()).map(|r| r.name.as_str()).collect()
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{:<8} {:<12} {}", r.verdict.label(), r.name, r.goal)?;
        }
        Ok(())
    }
}

/// Instantiates each axiom schema with fresh variables and runs the cut-free
/// prover on `∅ ⇒ instance` in `cal`.
pub fn axioms_to_sequents(sys: &HilbertSystem, cal: &CalculusId) -> CrossCheckReport {
    let rows = sys
        .axioms
        .iter()
        .map(|ax| {
            let inst = apply_subst(&fresh_instance_subst(&[&ax.schema]), &ax.schema);
            let goal = rho_prime(&inst);
            let verdict = prove(&goal, cal);
            CrossCheckRow { name: ax.name.clone(), hyps: BTreeSet::new(), goal, verdict }
        })
        .collect();
    CrossCheckReport { rows }
}

/// For each rule `⟨Φ, φ⟩`, searches for `{∅ ⇒ ψ : ψ ∈ Φ} ⊢ ∅ ⇒ φ` with
/// hypotheses and cut, up to `bound`.
pub fn validate_rules(sys: &HilbertSystem, cal: &CalculusId, bound: usize) -> CrossCheckReport {
    let rows = sys
        .rules
        .iter()
        .map(|r| {
            let all: Vec<&Formula> = r.premises.iter().chain(std::iter::once(&r.conclusion)).collect();
            let s = fresh_instance_subst(&all);
            let hyps: BTreeSet<Sequent> = r.premises.iter().map(|f| rho_prime(&apply_subst(&s, f))).collect();
            let goal = rho_prime(&apply_subst(&s, &r.conclusion));
            let verdict = prove_with_hyps(&goal, &hyps, cal, bound);
            CrossCheckRow { name: r.name.clone(), hyps, goal, verdict }
        })
        .collect();
    CrossCheckReport { rows }
}

/// The presets by name: `hfl`, `hfl-e`, `var`.
pub fn preset(name: &str) -> Option<HilbertSystem> {
    match name {
        "hfl" => Some(hfl()),
        "hfl-e" | "hfle" => Some(hfl_e()),
        "var" | "van-alten-raftery" => Some(van_alten_raftery()),
        _ => None,
    }
}

/// Names of the axioms by schema, for display.
pub fn axiom_table(sys: &HilbertSystem) -> BTreeMap<String, String> {
    sys.axioms.iter().map(|a| (a.name.clone(), a.schema.to_string())).collect()
}
