//! Rule schemata of the full Lambek calculus and its structural extensions,
//! proof trees, proof checking, backward rule inversion, mirrored proofs and
//! the explicit derivations linking sequents with their equational images.
//!
//! ```
//! use substrukt::calculus::{check_proof, CalculusId, ProofTree, RuleId, Sigma};
//! use substrukt::sequents::parse_sequent;
//! use substrukt::syntax::Language;
//!
//! let lang = Language::full();
//! let goal = parse_sequent("=> 1 \\/ p", &lang).unwrap();
//! let one = ProofTree::leaf(RuleId::OneR, parse_sequent("=> 1", &lang).unwrap());
//! let tree = ProofTree::node(RuleId::OrR1, goal, vec![one]);
//! let cal = CalculusId::new(Sigma::empty(), lang);
//! assert!(check_proof(&tree, &cal, &Default::default()).is_ok());
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::sequents::{fuse, mirror_sequent, parse_sequent, rho, succedent_or_zero, tau, Sequent};
use crate::syntax::{BinOp, Connective, Formula, Language, UnOp};

/// A set of structural rules drawn from exchange, left/right weakening and contraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sigma {
    /// Exchange.
    pub e: bool,
    /// Left weakening.
    pub wl: bool,
    /// Right weakening.
    pub wr: bool,
    /// Contraction.
    pub c: bool,
}

/// Errors raised when parsing a [`Sigma`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown structural rule `{0}` (expected e, wl, wr, w or c)")]
pub struct SigmaError(pub String);

impl Sigma {
    /// No structural rules.
    pub fn empty() -> Sigma {
        Sigma::default()
    }

    /// All four structural rules.
    pub fn all_rules() -> Sigma {
        Sigma { e: true, wl: true, wr: true, c: true }
    }

    /// All sixteen subsets, in a fixed order.
    pub fn all() -> Vec<Sigma> {
        (0u8..16)
            .map(|m| Sigma { e: m & 1 != 0, wl: m & 2 != 0, wr: m & 4 != 0, c: m & 8 != 0 })
            .collect()
    }

    /// Parses a comma-separated list such as `e,wl` or `w` (which means `wl,wr`).
    pub fn parse(s: &str) -> Result<Sigma, SigmaError> {
        let mut out = Sigma::empty();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "e" => out.e = true,
                "wl" => out.wl = true,
                "wr" => out.wr = true,
                "w" => {
                    out.wl = true;
                    out.wr = true;
                }
                "c" => out.c = true,
                other => return Err(SigmaError(other.to_string())),
            }
        }
        Ok(out)
    }

    /// Whether every rule of `self` is also in `other`.
    pub fn is_subset_of(self, other: Sigma) -> bool {
        (!self.e || other.e) && (!self.wl || other.wl) && (!self.wr || other.wr) && (!self.c || other.c)
    }

    /// Union of two rule sets.
    pub fn union(self, other: Sigma) -> Sigma {
        Sigma { e: self.e || other.e, wl: self.wl || other.wl, wr: self.wr || other.wr, c: self.c || other.c }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.e {
            parts.push("e");
        }
        if self.wl {
            parts.push("wl");
        }
        if self.wr {
            parts.push("wr");
        }
        if self.c {
            parts.push("c");
        }
        f.write_str(&parts.join(","))
    }
}

/// A calculus: the structural core, introduction rules for the connectives
/// of `lang`, and the structural rules of `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CalculusId {
    /// Structural rules.
    pub sigma: Sigma,
    /// Propositional language.
    pub lang: Language,
}

impl CalculusId {
    /// Builds a calculus identifier.
    pub fn new(sigma: Sigma, lang: Language) -> CalculusId {
        CalculusId { sigma, lang }
    }

    /// Whether `rule` belongs to this calculus.
    pub fn has_rule(&self, rule: RuleId) -> bool {
        match rule.connective() {
            Some(c) if !self.lang.contains(c) => return false,
            _ => {}
        }
        match rule {
            RuleId::ExchL => self.sigma.e,
            RuleId::WeakL => self.sigma.wl,
            RuleId::WeakR => self.sigma.wr,
            RuleId::ContrL => self.sigma.c,
            _ => true,
        }
    }

    /// Every rule of the calculus (hypotheses excluded).
    pub fn rules(&self) -> Vec<RuleId> {
        RuleId::ALL.iter().copied().filter(|r| *r != RuleId::Hypothesis && self.has_rule(*r)).collect()
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FL[{}]{{{}}}", self.lang, self.sigma)
    }
}

/// Names of the axioms and rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(missing_docs)]
pub enum RuleId {
    Axiom,
    Cut,
    OrL,
    OrR1,
    OrR2,
    AndL1,
    AndL2,
    AndR,
    FusL,
    FusR,
    RimpL,
    RimpR,
    LimpL,
    LimpR,
    RnegL,
    RnegR,
    LnegL,
    LnegR,
    OneL,
    OneR,
    ZeroL,
    ZeroR,
    ExchL,
    WeakL,
    WeakR,
    ContrL,
    Hypothesis,
}

impl RuleId {
    /// Every rule identifier.
    pub const ALL: [RuleId; 27] = [
        RuleId::Axiom,
        RuleId::Cut,
        RuleId::OrL,
        RuleId::OrR1,
        RuleId::OrR2,
        RuleId::AndL1,
        RuleId::AndL2,
        RuleId::AndR,
        RuleId::FusL,
        RuleId::FusR,
        RuleId::RimpL,
        RuleId::RimpR,
        RuleId::LimpL,
        RuleId::LimpR,
        RuleId::RnegL,
        RuleId::RnegR,
        RuleId::LnegL,
        RuleId::LnegR,
        RuleId::OneL,
        RuleId::OneR,
        RuleId::ZeroL,
        RuleId::ZeroR,
        RuleId::ExchL,
        RuleId::WeakL,
        RuleId::WeakR,
        RuleId::ContrL,
        RuleId::Hypothesis,
    ];

    /// Kebab-case name used in S-expressions.
    pub fn name(self) -> &'static str {
        match self {
            RuleId::Axiom => "axiom",
            RuleId::Cut => "cut",
            RuleId::OrL => "or-l",
            RuleId::OrR1 => "or-r1",
            RuleId::OrR2 => "or-r2",
            RuleId::AndL1 => "and-l1",
            RuleId::AndL2 => "and-l2",
            RuleId::AndR => "and-r",
            RuleId::FusL => "fus-l",
            RuleId::FusR => "fus-r",
            RuleId::RimpL => "rimp-l",
            RuleId::RimpR => "rimp-r",
            RuleId::LimpL => "limp-l",
            RuleId::LimpR => "limp-r",
            RuleId::RnegL => "rneg-l",
            RuleId::RnegR => "rneg-r",
            RuleId::LnegL => "lneg-l",
            RuleId::LnegR => "lneg-r",
            RuleId::OneL => "one-l",
            RuleId::OneR => "one-r",
            RuleId::ZeroL => "zero-l",
            RuleId::ZeroR => "zero-r",
            RuleId::ExchL => "exch-l",
            RuleId::WeakL => "weak-l",
            RuleId::WeakR => "weak-r",
            RuleId::ContrL => "contr-l",
            RuleId::Hypothesis => "hyp",
        }
    }

    /// Inverse of [`RuleId::name`].
    pub fn from_name(s: &str) -> Option<RuleId> {
        RuleId::ALL.iter().copied().find(|r| r.name() == s)
    }

    /// Number of premises.
    pub fn arity(self) -> usize {
        match self {
            RuleId::Axiom | RuleId::OneR | RuleId::ZeroL | RuleId::Hypothesis => 0,
            RuleId::Cut | RuleId::OrL | RuleId::AndR | RuleId::FusR | RuleId::RimpL | RuleId::LimpL => 2,
            _ => 1,
        }
    }

    /// The connective introduced by the rule, if any.
    pub fn connective(self) -> Option<Connective> {
        Some(match self {
            RuleId::OrL | RuleId::OrR1 | RuleId::OrR2 => Connective::Join,
            RuleId::AndL1 | RuleId::AndL2 | RuleId::AndR => Connective::Meet,
            RuleId::FusL | RuleId::FusR => Connective::Fus,
            RuleId::RimpL | RuleId::RimpR => Connective::Rimp,
            RuleId::LimpL | RuleId::LimpR => Connective::Limp,
            RuleId::RnegL | RuleId::RnegR => Connective::Rneg,
            RuleId::LnegL | RuleId::LnegR => Connective::Lneg,
            RuleId::OneL | RuleId::OneR => Connective::One,
            RuleId::ZeroL | RuleId::ZeroR => Connective::Zero,
            _ => return None,
        })
    }

    /// The rule whose instances are the mirror images of this rule's instances.
    pub fn mirror(self) -> RuleId {
        match self {
            RuleId::RimpL => RuleId::LimpL,
            RuleId::LimpL => RuleId::RimpL,
            RuleId::RimpR => RuleId::LimpR,
            RuleId::LimpR => RuleId::RimpR,
            RuleId::RnegL => RuleId::LnegL,
            RuleId::LnegL => RuleId::RnegL,
            RuleId::RnegR => RuleId::LnegR,
            RuleId::LnegR => RuleId::RnegR,
            other => other,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A proof tree: every node records its rule, its conclusion and its premises.
///
/// Since premises and conclusion are stored in full, the position data of a
/// rule instance is recovered by the checker; replay is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofTree {
    /// The rule applied at the root.
    pub rule: RuleId,
    /// The sequent proved.
    pub conclusion: Sequent,
    /// Subproofs of the premises, in schema order.
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    /// A node without premises (axiom or hypothesis).
    pub fn leaf(rule: RuleId, conclusion: Sequent) -> ProofTree {
        ProofTree { rule, conclusion, premises: Vec::new() }
    }

    /// An inner node.
    pub fn node(rule: RuleId, conclusion: Sequent, premises: Vec<ProofTree>) -> ProofTree {
        ProofTree { rule, conclusion, premises }
    }

    /// A hypothesis leaf.
    pub fn hyp(conclusion: Sequent) -> ProofTree {
        ProofTree::leaf(RuleId::Hypothesis, conclusion)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::size).sum::<usize>()
    }

    /// Longest root-to-leaf path, counting nodes.
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::height).max().unwrap_or(0)
    }

    /// Whether any node uses `rule`.
    pub fn uses(&self, rule: RuleId) -> bool {
        self.rule == rule || self.premises.iter().any(|p| p.uses(rule))
    }

    /// Every rule used, with multiplicity ignored.
    pub fn rules_used(&self) -> BTreeSet<RuleId> {
        let mut out = BTreeSet::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut BTreeSet<RuleId>) {
        out.insert(self.rule);
        for p in &self.premises {
            p.collect_rules(out);
        }
    }

    /// Serializes as `(rule-name "conclusion" premise*)`.
    pub fn to_sexp(&self) -> String {
        let mut out = String::new();
        self.write_sexp(&mut out, 0);
        out
    }

    fn write_sexp(&self, out: &mut String, indent: usize) {
        out.push('(');
        out.push_str(self.rule.name());
        out.push(' ');
        out.push_str(&quote(&self.conclusion.to_string()));
        for p in &self.premises {
            out.push('\n');
            out.push_str(&" ".repeat(indent + 2));
            p.write_sexp(out, indent + 2);
        }
        out.push(')');
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// Errors raised by [`parse_proof_sexp`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexpError {
    /// Malformed S-expression.
    #[error("malformed proof at byte {pos}: {msg}")]
    Malformed {
        /// Byte offset.
        pos: usize,
        /// Description.
        msg: String,
    },
    /// A conclusion failed to parse.
    #[error("bad sequent `{text}`: {err}")]
    Sequent {
        /// The offending text.
        text: String,
        /// The parse error.
        err: crate::syntax::ParseError,
    },
}

/// Parses the S-expression form produced by [`ProofTree::to_sexp`].
pub fn parse_proof_sexp(text: &str, lang: &Language) -> Result<ProofTree, SexpError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let tree = parse_sexp_node(text, bytes, &mut pos, lang)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(SexpError::Malformed { pos, msg: "trailing input".into() });
    }
    Ok(tree)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_sexp_node(text: &str, bytes: &[u8], pos: &mut usize, lang: &Language) -> Result<ProofTree, SexpError> {
    let bad = |pos: usize, msg: &str| SexpError::Malformed { pos, msg: msg.into() };
    skip_ws(bytes, pos);
    if bytes.get(*pos) != Some(&b'(') {
        return Err(bad(*pos, "expected `(`"));
    }
    *pos += 1;
    skip_ws(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'(' && bytes[*pos] != b')' {
        *pos += 1;
    }
    let name = &text[start..*pos];
    let rule = RuleId::from_name(name).ok_or_else(|| bad(start, &format!("unknown rule `{name}`")))?;
    skip_ws(bytes, pos);
    if bytes.get(*pos) != Some(&b'"') {
        return Err(bad(*pos, "expected quoted conclusion"));
    }
    *pos += 1;
    let mut seq_text = String::new();
    loop {
        match bytes.get(*pos) {
            None => return Err(bad(*pos, "unterminated string")),
            Some(b'"') => {
                *pos += 1;
                break;
            }
            Some(b'\\') => {
                let next = text[*pos + 1..].chars().next().ok_or_else(|| bad(*pos, "dangling escape"))?;
                seq_text.push(next);
                *pos += 1 + next.len_utf8();
            }
            Some(_) => {
                let ch = text[*pos..].chars().next().expect("in bounds");
                seq_text.push(ch);
                *pos += ch.len_utf8();
            }
        }
    }
    let conclusion =
        parse_sequent(&seq_text, lang).map_err(|err| SexpError::Sequent { text: seq_text.clone(), err })?;
    let mut premises = Vec::new();
    loop {
        skip_ws(bytes, pos);
        match bytes.get(*pos) {
            Some(b')') => {
                *pos += 1;
                break;
            }
            Some(b'(') => premises.push(parse_sexp_node(text, bytes, pos, lang)?),
            _ => return Err(bad(*pos, "expected `(` or `)`")),
        }
    }
    Ok(ProofTree { rule, conclusion, premises })
}

/// Why a proof was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofErrorKind {
    /// The rule is not part of the calculus.
    #[error("rule-not-in-calculus: {0}")]
    RuleNotInCalculus(RuleId),
    /// Wrong number of premises.
    #[error("arity mismatch: {rule} takes {expected} premise(s), found {found}")]
    Arity {
        /// The rule.
        rule: RuleId,
        /// Premises the schema requires.
        expected: usize,
        /// Premises supplied.
        found: usize,
    },
    /// Premises and conclusion do not form an instance of the schema.
    #[error("instance mismatch: not an instance of {0}")]
    InstanceMismatch(RuleId),
    /// A hypothesis leaf cites an undeclared sequent.
    #[error("hypothesis-not-declared")]
    HypothesisNotDeclared,
    /// A formula uses a connective outside the calculus language.
    #[error("{0} not in language")]
    NotInLanguage(Connective),
}

/// A rejected proof: the first offending node (by pre-order) and the reason.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at node {path:?} `{conclusion}`: {kind}")]
pub struct ProofError {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    /// Conclusion of the offending node.
    pub conclusion: Sequent,
    /// The reason.
    pub kind: ProofErrorKind,
}

/// Checks that every node is a correct rule instance of `cal`, or a declared hypothesis.
pub fn check_proof(t: &ProofTree, cal: &CalculusId, hyps: &BTreeSet<Sequent>) -> Result<(), ProofError> {
    let mut path = Vec::new();
    check_node(t, cal, hyps, &mut path)
}

fn check_node(t: &ProofTree, cal: &CalculusId, hyps: &BTreeSet<Sequent>, path: &mut Vec<usize>) -> Result<(), ProofError> {
    let fail = |kind: ProofErrorKind, path: &Vec<usize>| ProofError { path: path.clone(), conclusion: t.conclusion.clone(), kind };
    if let Some(c) = t.conclusion.formulas().find_map(|f| f.connective_outside(cal.lang)) {
        return Err(fail(ProofErrorKind::NotInLanguage(c), path));
    }
    if t.rule == RuleId::Hypothesis {
        if !t.premises.is_empty() {
            return Err(fail(ProofErrorKind::Arity { rule: t.rule, expected: 0, found: t.premises.len() }, path));
        }
        if !hyps.contains(&t.conclusion) {
            return Err(fail(ProofErrorKind::HypothesisNotDeclared, path));
        }
        return Ok(());
    }
    if !cal.has_rule(t.rule) {
        return Err(fail(ProofErrorKind::RuleNotInCalculus(t.rule), path));
    }
    if t.premises.len() != t.rule.arity() {
        return Err(fail(
            ProofErrorKind::Arity { rule: t.rule, expected: t.rule.arity(), found: t.premises.len() },
            path,
        ));
    }
    let prem: Vec<&Sequent> = t.premises.iter().map(|p| &p.conclusion).collect();
    if !is_instance(t.rule, &t.conclusion, &prem) {
        return Err(fail(ProofErrorKind::InstanceMismatch(t.rule), path));
    }
    for (i, p) in t.premises.iter().enumerate() {
        path.push(i);
        check_node(p, cal, hyps, path)?;
        path.pop();
    }
    Ok(())
}

fn bin(f: &Formula, op: BinOp) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Bin(o, a, b) if *o == op => Some((a, b)),
        _ => None,
    }
}

fn un(f: &Formula, op: UnOp) -> Option<&Formula> {
    match f {
        Formula::Un(o, a) if *o == op => Some(a),
        _ => None,
    }
}

fn replaced(v: &[Formula], i: usize, with: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::with_capacity(v.len() + with.len());
    out.extend_from_slice(&v[..i]);
    out.extend_from_slice(with);
    out.extend_from_slice(&v[i + 1..]);
    out
}

fn concat(parts: &[&[Formula]]) -> Vec<Formula> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// Whether `conclusion` follows from `premises` by one application of `rule`
/// (hypotheses excluded; calculus membership is not checked here).
pub fn is_instance(rule: RuleId, c: &Sequent, p: &[&Sequent]) -> bool {
    if p.len() != rule.arity() {
        return false;
    }
    let g = &c.ante;
    let n = g.len();
    match rule {
        RuleId::Hypothesis => false,
        RuleId::Axiom => n == 1 && c.succ.as_ref() == Some(&g[0]),
        RuleId::OneR => n == 0 && c.succ == Some(Formula::One),
        RuleId::ZeroL => n == 1 && g[0] == Formula::Zero && c.succ.is_none(),
        RuleId::Cut => {
            let Some(phi) = &p[0].succ else { return false };
            if p[1].succ != c.succ {
                return false;
            }
            let right = &p[1].ante;
            (0..right.len()).any(|i| &right[i] == phi && *g == concat(&[&right[..i], &p[0].ante, &right[i + 1..]]))
        }
        RuleId::OrL => {
            p[0].succ == c.succ
                && p[1].succ == c.succ
                && (0..n).any(|i| {
                    bin(&g[i], BinOp::Join).is_some_and(|(a, b)| {
                        p[0].ante == replaced(g, i, std::slice::from_ref(a))
                            && p[1].ante == replaced(g, i, std::slice::from_ref(b))
                    })
                })
        }
        RuleId::OrR1 | RuleId::OrR2 => {
            p[0].ante == *g
                && c.succ.as_ref().and_then(|s| bin(s, BinOp::Join)).is_some_and(|(a, b)| {
                    let side = if rule == RuleId::OrR1 { a } else { b };
                    p[0].succ.as_ref() == Some(side)
                })
        }
        RuleId::AndL1 | RuleId::AndL2 => {
            p[0].succ == c.succ
                && (0..n).any(|i| {
                    bin(&g[i], BinOp::Meet).is_some_and(|(a, b)| {
                        let side = if rule == RuleId::AndL1 { a } else { b };
                        p[0].ante == replaced(g, i, std::slice::from_ref(side))
                    })
                })
        }
        RuleId::AndR => {
            p[0].ante == *g
                && p[1].ante == *g
                && c.succ.as_ref().and_then(|s| bin(s, BinOp::Meet)).is_some_and(|(a, b)| {
                    p[0].succ.as_ref() == Some(a) && p[1].succ.as_ref() == Some(b)
                })
        }
        RuleId::FusL => {
            p[0].succ == c.succ
                && (0..n).any(|i| {
                    bin(&g[i], BinOp::Fus).is_some_and(|(a, b)| p[0].ante == replaced(g, i, &[a.clone(), b.clone()]))
                })
        }
        RuleId::FusR => {
            c.succ.as_ref().and_then(|s| bin(s, BinOp::Fus)).is_some_and(|(a, b)| {
                p[0].succ.as_ref() == Some(a)
                    && p[1].succ.as_ref() == Some(b)
                    && *g == concat(&[&p[0].ante, &p[1].ante])
            })
        }
        RuleId::RimpL => {
            let (Some(phi), gam) = (&p[0].succ, &p[0].ante) else { return false };
            p[1].succ == c.succ
                && (0..n).any(|j| {
                    bin(&g[j], BinOp::Rimp).is_some_and(|(a, psi)| {
                        a == phi
                            && j >= gam.len()
                            && g[j - gam.len()..j] == gam[..]
                            && p[1].ante == concat(&[&g[..j - gam.len()], std::slice::from_ref(psi), &g[j + 1..]])
                    })
                })
        }
        RuleId::LimpL => {
            let (Some(phi), gam) = (&p[0].succ, &p[0].ante) else { return false };
            p[1].succ == c.succ
                && (0..n).any(|j| {
                    bin(&g[j], BinOp::Limp).is_some_and(|(a, psi)| {
                        let end = j + 1 + gam.len();
                        a == phi
                            && end <= n
                            && g[j + 1..end] == gam[..]
                            && p[1].ante == concat(&[&g[..j], std::slice::from_ref(psi), &g[end..]])
                    })
                })
        }
        RuleId::RimpR => c.succ.as_ref().and_then(|s| bin(s, BinOp::Rimp)).is_some_and(|(a, b)| {
            p[0].succ.as_ref() == Some(b) && p[0].ante == concat(&[std::slice::from_ref(a), g])
        }),
        RuleId::LimpR => c.succ.as_ref().and_then(|s| bin(s, BinOp::Limp)).is_some_and(|(a, b)| {
            p[0].succ.as_ref() == Some(b) && p[0].ante == concat(&[g, std::slice::from_ref(a)])
        }),
        RuleId::RnegL => {
            c.succ.is_none()
                && n >= 1
                && un(&g[n - 1], UnOp::Rneg).is_some_and(|a| p[0].succ.as_ref() == Some(a) && p[0].ante == g[..n - 1])
        }
        RuleId::LnegL => {
            c.succ.is_none()
                && n >= 1
                && un(&g[0], UnOp::Lneg).is_some_and(|a| p[0].succ.as_ref() == Some(a) && p[0].ante == g[1..])
        }
        RuleId::RnegR => c.succ.as_ref().and_then(|s| un(s, UnOp::Rneg)).is_some_and(|a| {
            p[0].succ.is_none() && p[0].ante == concat(&[std::slice::from_ref(a), g])
        }),
        RuleId::LnegR => c.succ.as_ref().and_then(|s| un(s, UnOp::Lneg)).is_some_and(|a| {
            p[0].succ.is_none() && p[0].ante == concat(&[g, std::slice::from_ref(a)])
        }),
        RuleId::OneL => p[0].succ == c.succ && (0..n).any(|i| g[i] == Formula::One && p[0].ante == replaced(g, i, &[])),
        RuleId::ZeroR => c.succ == Some(Formula::Zero) && p[0].succ.is_none() && p[0].ante == *g,
        RuleId::ExchL => {
            p[0].succ == c.succ
                && p[0].ante.len() == n
                && (0..n.saturating_sub(1)).any(|i| {
                    let mut v = p[0].ante.clone();
                    v.swap(i, i + 1);
                    v == *g
                })
        }
        RuleId::WeakL => {
            p[0].succ == c.succ && p[0].ante.len() + 1 == n && (0..n).any(|i| p[0].ante == replaced(g, i, &[]))
        }
        RuleId::WeakR => c.succ.is_some() && p[0].succ.is_none() && p[0].ante == *g,
        RuleId::ContrL => {
            let pa = &p[0].ante;
            p[0].succ == c.succ
                && pa.len() == n + 1
                && (0..n).any(|i| pa[i] == pa[i + 1] && replaced(pa, i, &[]) == *g)
        }
    }
}

/// Every `(rule, premises)` pair whose rule application yields `goal` in `cal`,
/// excluding Cut. Antecedents are treated as sequences (exchange, if present,
/// appears as explicit adjacent transpositions).
pub fn rule_instances_backward(goal: &Sequent, cal: &CalculusId) -> Vec<(RuleId, Vec<Sequent>)> {
    let mut out: Vec<(RuleId, Vec<Sequent>)> = Vec::new();
    let g = &goal.ante;
    let n = g.len();
    let d = &goal.succ;
    let mut push = |rule: RuleId, prem: Vec<Sequent>| {
        if cal.has_rule(rule) && !out.iter().any(|(r, p)| *r == rule && *p == prem) {
            out.push((rule, prem));
        }
    };
    let with_succ = |ante: Vec<Formula>| Sequent::new(ante, d.clone());

    if n == 1 && d.as_ref() == Some(&g[0]) {
        push(RuleId::Axiom, vec![]);
    }
    if n == 0 && *d == Some(Formula::One) {
        push(RuleId::OneR, vec![]);
    }
    if n == 1 && g[0] == Formula::Zero && d.is_none() {
        push(RuleId::ZeroL, vec![]);
    }
    for i in 0..n {
        match &g[i] {
            Formula::Bin(BinOp::Join, a, b) => push(
                RuleId::OrL,
                vec![with_succ(replaced(g, i, &[(**a).clone()])), with_succ(replaced(g, i, &[(**b).clone()]))],
            ),
            Formula::Bin(BinOp::Meet, a, b) => {
                push(RuleId::AndL1, vec![with_succ(replaced(g, i, &[(**a).clone()]))]);
                push(RuleId::AndL2, vec![with_succ(replaced(g, i, &[(**b).clone()]))]);
            }
            Formula::Bin(BinOp::Fus, a, b) => {
                push(RuleId::FusL, vec![with_succ(replaced(g, i, &[(**a).clone(), (**b).clone()]))]);
            }
            Formula::Bin(BinOp::Rimp, phi, psi) => {
                for k in 0..=i {
                    push(
                        RuleId::RimpL,
                        vec![
                            Sequent::to(g[k..i].to_vec(), (**phi).clone()),
                            with_succ(concat(&[&g[..k], std::slice::from_ref(psi), &g[i + 1..]])),
                        ],
                    );
                }
            }
            Formula::Bin(BinOp::Limp, phi, psi) => {
                for e in i + 1..=n {
                    push(
                        RuleId::LimpL,
                        vec![
                            Sequent::to(g[i + 1..e].to_vec(), (**phi).clone()),
                            with_succ(concat(&[&g[..i], std::slice::from_ref(psi), &g[e..]])),
                        ],
                    );
                }
            }
            Formula::Un(UnOp::Rneg, a) if i == n - 1 && d.is_none() => {
                push(RuleId::RnegL, vec![Sequent::to(g[..n - 1].to_vec(), (**a).clone())]);
            }
            Formula::Un(UnOp::Lneg, a) if i == 0 && d.is_none() => {
                push(RuleId::LnegL, vec![Sequent::to(g[1..].to_vec(), (**a).clone())]);
            }
            Formula::One => push(RuleId::OneL, vec![with_succ(replaced(g, i, &[]))]),
            _ => {}
        }
    }
    match d {
        Some(Formula::Bin(BinOp::Join, a, b)) => {
            push(RuleId::OrR1, vec![Sequent::to(g.clone(), (**a).clone())]);
            push(RuleId::OrR2, vec![Sequent::to(g.clone(), (**b).clone())]);
        }
        Some(Formula::Bin(BinOp::Meet, a, b)) => push(
            RuleId::AndR,
            vec![Sequent::to(g.clone(), (**a).clone()), Sequent::to(g.clone(), (**b).clone())],
        ),
        Some(Formula::Bin(BinOp::Fus, a, b)) => {
            for k in 0..=n {
                push(
                    RuleId::FusR,
                    vec![Sequent::to(g[..k].to_vec(), (**a).clone()), Sequent::to(g[k..].to_vec(), (**b).clone())],
                );
            }
        }
        Some(Formula::Bin(BinOp::Rimp, a, b)) => {
            push(RuleId::RimpR, vec![Sequent::to(concat(&[std::slice::from_ref(&**a), g]), (**b).clone())]);
        }
        Some(Formula::Bin(BinOp::Limp, a, b)) => {
            push(RuleId::LimpR, vec![Sequent::to(concat(&[g, std::slice::from_ref(&**a)]), (**b).clone())]);
        }
        Some(Formula::Un(UnOp::Rneg, a)) => {
            push(RuleId::RnegR, vec![Sequent::to_empty(concat(&[std::slice::from_ref(&**a), g]))]);
        }
        Some(Formula::Un(UnOp::Lneg, a)) => {
            push(RuleId::LnegR, vec![Sequent::to_empty(concat(&[g, std::slice::from_ref(&**a)]))]);
        }
        Some(Formula::Zero) => push(RuleId::ZeroR, vec![Sequent::to_empty(g.clone())]),
        _ => {}
    }
    for i in 0..n.saturating_sub(1) {
        let mut v = g.clone();
        v.swap(i, i + 1);
        push(RuleId::ExchL, vec![with_succ(v)]);
    }
    for i in 0..n {
        push(RuleId::WeakL, vec![with_succ(replaced(g, i, &[]))]);
    }
    if d.is_some() {
        push(RuleId::WeakR, vec![Sequent::to_empty(g.clone())]);
    }
    for i in 0..n {
        push(RuleId::ContrL, vec![with_succ(replaced(g, i, &[g[i].clone(), g[i].clone()]))]);
    }
    out
}

/// Mirrors a proof node by node; the result proves the mirrored conclusion
/// from the mirrored hypotheses.
pub fn mirror_proof(t: &ProofTree) -> ProofTree {
    let mut premises: Vec<ProofTree> = t.premises.iter().map(mirror_proof).collect();
    if t.rule == RuleId::FusR {
        premises.reverse();
    }
    ProofTree { rule: t.rule.mirror(), conclusion: mirror_sequent(&t.conclusion), premises }
}

/// Builds a chain of exchange steps turning a proof of `t.conclusion` into a
/// proof of `target`, whose antecedent must be a permutation of it.
pub fn permute_proof(t: ProofTree, target: &Sequent) -> ProofTree {
    assert_eq!(t.conclusion.succ, target.succ, "succedents must agree");
    let mut cur = t;
    let mut ante = cur.conclusion.ante.clone();
    // Selection by adjacent swaps: bring each target formula into place.
    for i in 0..target.ante.len() {
        let j = (i..ante.len()).find(|&j| ante[j] == target.ante[i]).expect("antecedents must be permutations");
        for k in (i..j).rev() {
            ante.swap(k, k + 1);
            let concl = Sequent::new(ante.clone(), target.succ.clone());
            cur = ProofTree::node(RuleId::ExchL, concl, vec![cur]);
        }
    }
    cur
}

/// The explicit derivations connecting sequents, products and their translations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// From hypothesis `φ ⇒ ψ`, derive `φ ∨ ψ ⇒ ψ`.
    JoinAbsorb {
        /// φ
        phi: Formula,
        /// ψ
        psi: Formula,
    },
    /// From hypothesis `φ ∨ ψ ⇒ ψ`, derive `φ ⇒ ψ` (uses Cut).
    JoinRelease {
        /// φ
        phi: Formula,
        /// ψ
        psi: Formula,
    },
    /// Without hypotheses, derive `Γ ⇒ ∏Γ`.
    ProductRight(Vec<Formula>),
    /// From hypothesis `Γ ⇒ Δ`, derive `∏Γ ⇒ δ` (δ the succedent, or 0).
    Collapse(Sequent),
    /// From hypothesis `∏Γ ⇒ δ`, derive `Γ ⇒ Δ` (uses Cut).
    Expand(Sequent),
    /// From hypothesis `ς`, derive each sequent of `ρ(τ(ς))`, in set order.
    TranslateForward(Sequent),
    /// From the hypotheses `ρ(τ(ς))`, derive `ς` (uses Cut).
    TranslateBackward(Sequent),
}

/// Errors raised by [`build_lemma_proofs`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    /// An input formula uses a connective outside the language.
    #[error("{0} not in language")]
    NotInLanguage(Connective),
}

impl Construction {
    /// The hypotheses the construction's trees rely on.
    pub fn hypotheses(&self) -> BTreeSet<Sequent> {
        match self {
            Construction::JoinAbsorb { phi, psi } => BTreeSet::from([Sequent::to(vec![phi.clone()], psi.clone())]),
            Construction::JoinRelease { phi, psi } => {
                BTreeSet::from([Sequent::to(vec![Formula::join(phi.clone(), psi.clone())], psi.clone())])
            }
            Construction::ProductRight(_) => BTreeSet::new(),
            Construction::Collapse(s) | Construction::TranslateForward(s) => BTreeSet::from([s.clone()]),
            Construction::Expand(s) => BTreeSet::from([product_sequent(s)]),
            Construction::TranslateBackward(s) => rho_tau(s),
        }
    }

    fn formulas(&self) -> Vec<Formula> {
        match self {
            Construction::JoinAbsorb { phi, psi } | Construction::JoinRelease { phi, psi } => vec![phi.clone(), psi.clone()],
            Construction::ProductRight(g) => g.clone(),
            Construction::Collapse(s)
            | Construction::Expand(s)
            | Construction::TranslateForward(s)
            | Construction::TranslateBackward(s) => s.formulas().cloned().collect(),
        }
    }
}

/// `ρ(τ(ς))` as a set of sequents.
pub fn rho_tau(s: &Sequent) -> BTreeSet<Sequent> {
    tau(s).iter().flat_map(rho).collect()
}

/// `∏Γ ⇒ δ` for `ς = Γ ⇒ Δ`.
pub fn product_sequent(s: &Sequent) -> Sequent {
    Sequent::to(vec![fuse(&s.ante)], succedent_or_zero(s))
}

fn axiom(f: &Formula) -> ProofTree {
    ProofTree::leaf(RuleId::Axiom, Sequent::to(vec![f.clone()], f.clone()))
}

fn join_release(phi: &Formula, psi: &Formula, from: ProofTree) -> ProofTree {
    let jp = Formula::join(phi.clone(), psi.clone());
    let left = ProofTree::node(RuleId::OrR1, Sequent::to(vec![phi.clone()], jp), vec![axiom(phi)]);
    ProofTree::node(RuleId::Cut, Sequent::to(vec![phi.clone()], psi.clone()), vec![left, from])
}

fn product_right(gamma: &[Formula]) -> ProofTree {
    match gamma.len() {
        0 => ProofTree::leaf(RuleId::OneR, Sequent::to(vec![], Formula::One)),
        1 => axiom(&gamma[0]),
        m => {
            let left = product_right(&gamma[..m - 1]);
            ProofTree::node(
                RuleId::FusR,
                Sequent::to(gamma.to_vec(), fuse(gamma)),
                vec![left, axiom(&gamma[m - 1])],
            )
        }
    }
}

/// From a proof of `Γ ⇒ Δ`, a proof of `∏Γ ⇒ δ`.
fn collapse(s: &Sequent, from: ProofTree) -> ProofTree {
    let g = &s.ante;
    let mut cur = from;
    if g.is_empty() {
        cur = ProofTree::node(RuleId::OneL, Sequent::new(vec![Formula::One], s.succ.clone()), vec![cur]);
    } else {
        for k in 1..g.len() {
            let ante = concat(&[&[fuse(&g[..k + 1])], &g[k + 1..]]);
            cur = ProofTree::node(RuleId::FusL, Sequent::new(ante, s.succ.clone()), vec![cur]);
        }
    }
    if s.succ.is_none() {
        cur = ProofTree::node(RuleId::ZeroR, Sequent::to(vec![fuse(g)], Formula::Zero), vec![cur]);
    }
    cur
}

/// From a proof of `∏Γ ⇒ δ`, a proof of `Γ ⇒ Δ`.
fn expand(s: &Sequent, from: ProofTree) -> ProofTree {
    let g = &s.ante;
    let delta = succedent_or_zero(s);
    let mut cur = if g.len() == 1 {
        from
    } else {
        ProofTree::node(RuleId::Cut, Sequent::to(g.clone(), delta), vec![product_right(g), from])
    };
    if s.succ.is_none() {
        let zero_l = ProofTree::leaf(RuleId::ZeroL, Sequent::to_empty(vec![Formula::Zero]));
        cur = ProofTree::node(RuleId::Cut, Sequent::to_empty(g.clone()), vec![cur, zero_l]);
    }
    cur
}

/// Builds the explicit derivations described by `kind`.
///
/// Every construction yields one tree except [`Construction::TranslateForward`],
/// which yields one tree per sequent of `ρ(τ(ς))`. The trees are accepted by
/// [`check_proof`] in any calculus over `lang`, with [`Construction::hypotheses`]
/// as hypotheses.
pub fn build_lemma_proofs(kind: &Construction, lang: Language) -> Result<Vec<ProofTree>, ConstructionError> {
    if let Some(c) = kind.formulas().iter().find_map(|f| f.connective_outside(lang)) {
        return Err(ConstructionError::NotInLanguage(c));
    }
    Ok(match kind {
        Construction::JoinAbsorb { phi, psi } => {
            let hyp = ProofTree::hyp(Sequent::to(vec![phi.clone()], psi.clone()));
            vec![ProofTree::node(
                RuleId::OrL,
                Sequent::to(vec![Formula::join(phi.clone(), psi.clone())], psi.clone()),
                vec![hyp, axiom(psi)],
            )]
        }
        Construction::JoinRelease { phi, psi } => {
            let hyp = ProofTree::hyp(Sequent::to(vec![Formula::join(phi.clone(), psi.clone())], psi.clone()));
            vec![join_release(phi, psi, hyp)]
        }
        Construction::ProductRight(g) => vec![product_right(g)],
        Construction::Collapse(s) => vec![collapse(s, ProofTree::hyp(s.clone()))],
        Construction::Expand(s) => vec![expand(s, ProofTree::hyp(product_sequent(s)))],
        Construction::TranslateForward(s) => {
            let p = fuse(&s.ante);
            let delta = succedent_or_zero(s);
            let pd = Formula::join(p, delta.clone());
            let absorb = ProofTree::node(
                RuleId::OrL,
                Sequent::to(vec![pd.clone()], delta.clone()),
                vec![collapse(s, ProofTree::hyp(s.clone())), axiom(&delta)],
            );
            let lift = ProofTree::node(RuleId::OrR2, Sequent::to(vec![delta.clone()], pd), vec![axiom(&delta)]);
            rho_tau(s)
                .iter()
                .map(|target| if absorb.conclusion == *target { absorb.clone() } else { lift.clone() })
                .collect()
        }
        Construction::TranslateBackward(s) => {
            let p = fuse(&s.ante);
            let delta = succedent_or_zero(s);
            let hyp = ProofTree::hyp(Sequent::to(vec![Formula::join(p.clone(), delta.clone())], delta.clone()));
            vec![expand(s, join_release(&p, &delta, hyp))]
        }
    })
}
