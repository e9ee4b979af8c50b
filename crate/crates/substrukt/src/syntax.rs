//! Formulas, propositional languages, substitutions and the mirror transform.
//!
//! The full language has nine connectives: additive disjunction `\/`,
//! additive conjunction `/\`, fusion `*`, the two implications `\` and `/`,
//! the two negations `rn(..)` / `ln(..)`, and the constants `0` and `1`.
//!
//! Orientation is fixed once and for all:
//!
//! * `Formula::rimp(a, b)` is `a \ b` ("a under b"),
//! * `Formula::limp(a, b)` is `b / a` (the *numerator is the second argument*),
//! * `rn(x)` behaves as `x \ 0` and `ln(x)` as `0 / x`.
//!
//! ```
//! use substrukt::syntax::{parse_formula, mirror_formula, Language};
//!
//! let f = parse_formula("p \\ q", &Language::full()).unwrap();
//! assert_eq!(mirror_formula(&f).to_string(), "q / p");
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// One of the nine connectives of the full language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    /// Additive disjunction `\/`.
    Join,
    /// Additive conjunction `/\`.
    Meet,
    /// Fusion (multiplicative conjunction) `*`.
    Fus,
    /// Right implication `a \ b`.
    Rimp,
    /// Left implication `b / a`.
    Limp,
    /// Right negation `rn(a)`, i.e. `a \ 0`.
    Rneg,
    /// Left negation `ln(a)`, i.e. `0 / a`.
    Lneg,
    /// The constant `0`.
    Zero,
    /// The constant `1`.
    One,
}

impl Connective {
    /// All connectives in canonical order.
    pub const ALL: [Connective; 9] = [
        Connective::Join,
        Connective::Meet,
        Connective::Fus,
        Connective::Rimp,
        Connective::Limp,
        Connective::Rneg,
        Connective::Lneg,
        Connective::Zero,
        Connective::One,
    ];

    /// Lower-case identifier used in messages, JSON and the CLI.
    pub fn name(self) -> &'static str {
        match self {
            Connective::Join => "join",
            Connective::Meet => "meet",
            Connective::Fus => "fus",
            Connective::Rimp => "rimp",
            Connective::Limp => "limp",
            Connective::Rneg => "rneg",
            Connective::Lneg => "lneg",
            Connective::Zero => "zero",
            Connective::One => "one",
        }
    }

    /// Inverse of [`Connective::name`].
    pub fn from_name(s: &str) -> Option<Connective> {
        Connective::ALL.iter().copied().find(|c| c.name() == s)
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A propositional language: a set of connectives that always contains
/// `join`, `fus`, `zero` and `one`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Language {
    bits: u16,
}

/// Errors raised when building a [`Language`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LanguageError {
    /// One of the always-present connectives is missing.
    #[error("language must contain join, fus, zero and one (missing {0})")]
    MissingCore(Connective),
    /// An unknown preset or connective name.
    #[error("unknown language or connective `{0}`")]
    Unknown(String),
}

impl Language {
    const CORE: [Connective; 4] = [
        Connective::Join,
        Connective::Fus,
        Connective::Zero,
        Connective::One,
    ];

    /// Builds a language from an arbitrary connective set, enforcing the core.
    pub fn new<I: IntoIterator<Item = Connective>>(conns: I) -> Result<Language, LanguageError> {
        let bits = conns.into_iter().fold(0u16, |acc, c| acc | c.bit());
        let lang = Language { bits };
        for c in Self::CORE {
            if !lang.contains(c) {
                return Err(LanguageError::MissingCore(c));
            }
        }
        Ok(lang)
    }

    fn from_list(conns: &[Connective]) -> Language {
        Language::new(conns.iter().copied()).expect("preset contains the core")
    }

    /// `⟨∨, *, 0, 1⟩`.
    pub fn core() -> Language {
        Self::from_list(&Self::CORE)
    }

    /// `⟨∨, ∧, *, 0, 1⟩`.
    pub fn core_meet() -> Language {
        Self::core().with(Connective::Meet)
    }

    /// `⟨∨, *, rn, ln, 0, 1⟩`.
    pub fn core_neg() -> Language {
        Self::core().with(Connective::Rneg).with(Connective::Lneg)
    }

    /// `⟨∨, ∧, *, rn, ln, 0, 1⟩`.
    pub fn core_meet_neg() -> Language {
        Self::core_neg().with(Connective::Meet)
    }

    /// The full language with all nine connectives.
    pub fn full() -> Language {
        Self::from_list(&Connective::ALL)
    }

    /// The five named presets, paired with their CLI names.
    pub fn presets() -> [(&'static str, Language); 5] {
        [
            ("core", Self::core()),
            ("core-meet", Self::core_meet()),
            ("core-neg", Self::core_neg()),
            ("core-meet-neg", Self::core_meet_neg()),
            ("full", Self::full()),
        ]
    }

    /// Parses a preset name or a comma-separated connective list.
    pub fn parse(s: &str) -> Result<Language, LanguageError> {
        let s = s.trim();
        if let Some((_, l)) = Self::presets().into_iter().find(|(n, _)| *n == s) {
            return Ok(l);
        }
        let mut conns = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            conns.push(Connective::from_name(part).ok_or_else(|| LanguageError::Unknown(part.into()))?);
        }
        Language::new(conns)
    }

    /// The language extended by one connective.
    pub fn with(self, c: Connective) -> Language {
        Language { bits: self.bits | c.bit() }
    }

    /// Whether `c` belongs to the language.
    pub fn contains(self, c: Connective) -> bool {
        self.bits & c.bit() != 0
    }

    /// Whether every connective of `self` belongs to `other`.
    pub fn is_sublanguage_of(self, other: Language) -> bool {
        self.bits & !other.bits == 0
    }

    /// Connectives of the language in canonical order.
    pub fn connectives(self) -> Vec<Connective> {
        Connective::ALL.iter().copied().filter(|c| self.contains(*c)).collect()
    }

    /// Preset name, if the language is one of the five presets.
    pub fn preset_name(self) -> Option<&'static str> {
        Self::presets().into_iter().find(|(_, l)| *l == self).map(|(n, _)| n)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset_name() {
            Some(n) => f.write_str(n),
            None => {
                let names: Vec<_> = self.connectives().iter().map(|c| c.name()).collect();
                f.write_str(&names.join(","))
            }
        }
    }
}

/// Binary connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    /// `\/`
    Join,
    /// `/\`
    Meet,
    /// `*`
    Fus,
    /// `a \ b`
    Rimp,
    /// `b / a` (stored as `Limp(a, b)`)
    Limp,
}

/// Unary connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    /// `rn(a)`
    Rneg,
    /// `ln(a)`
    Lneg,
}

impl BinOp {
    /// The corresponding [`Connective`].
    pub fn connective(self) -> Connective {
        match self {
            BinOp::Join => Connective::Join,
            BinOp::Meet => Connective::Meet,
            BinOp::Fus => Connective::Fus,
            BinOp::Rimp => Connective::Rimp,
            BinOp::Limp => Connective::Limp,
        }
    }
}

impl UnOp {
    /// The corresponding [`Connective`].
    pub fn connective(self) -> Connective {
        match self {
            UnOp::Rneg => Connective::Rneg,
            UnOp::Lneg => Connective::Lneg,
        }
    }
}

/// A formula of the full language.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// A propositional variable.
    Var(String),
    /// The constant `0`.
    Zero,
    /// The constant `1`.
    One,
    /// A binary connective applied to two subformulas.
    Bin(BinOp, Box<Formula>, Box<Formula>),
    /// A negation applied to a subformula.
    Un(UnOp, Box<Formula>),
}

impl Formula {
    /// A variable.
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    /// `a \/ b`.
    pub fn join(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::Join, Box::new(a), Box::new(b))
    }

    /// `a /\ b`.
    pub fn meet(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::Meet, Box::new(a), Box::new(b))
    }

    /// `a * b`.
    pub fn fus(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::Fus, Box::new(a), Box::new(b))
    }

    /// `a \ b`.
    pub fn rimp(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::Rimp, Box::new(a), Box::new(b))
    }

    /// `b / a` — note the argument order.
    pub fn limp(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::Limp, Box::new(a), Box::new(b))
    }

    /// `rn(a)`.
    pub fn rneg(a: Formula) -> Formula {
        Formula::Un(UnOp::Rneg, Box::new(a))
    }

    /// `ln(a)`.
    pub fn lneg(a: Formula) -> Formula {
        Formula::Un(UnOp::Lneg, Box::new(a))
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Zero | Formula::One => 1,
            Formula::Bin(_, a, b) => 1 + a.size() + b.size(),
            Formula::Un(_, a) => 1 + a.size(),
        }
    }

    /// Height of the syntax tree (atoms have depth 0).
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Zero | Formula::One => 0,
            Formula::Bin(_, a, b) => 1 + a.depth().max(b.depth()),
            Formula::Un(_, a) => 1 + a.depth(),
        }
    }

    /// The main connective, if the formula is not a variable.
    pub fn main_connective(&self) -> Option<Connective> {
        match self {
            Formula::Var(_) => None,
            Formula::Zero => Some(Connective::Zero),
            Formula::One => Some(Connective::One),
            Formula::Bin(op, _, _) => Some(op.connective()),
            Formula::Un(op, _) => Some(op.connective()),
        }
    }

    /// Every connective occurring in the formula.
    pub fn connectives(&self) -> BTreeSet<Connective> {
        let mut out = BTreeSet::new();
        self.collect_connectives(&mut out);
        out
    }

    fn collect_connectives(&self, out: &mut BTreeSet<Connective>) {
        if let Some(c) = self.main_connective() {
            out.insert(c);
        }
        match self {
            Formula::Bin(_, a, b) => {
                a.collect_connectives(out);
                b.collect_connectives(out);
            }
            Formula::Un(_, a) => a.collect_connectives(out),
            _ => {}
        }
    }

    /// The first connective not in `lang`, if any.
    pub fn connective_outside(&self, lang: Language) -> Option<Connective> {
        self.connectives().into_iter().find(|c| !lang.contains(*c))
    }

    /// Whether every connective of the formula belongs to `lang`.
    pub fn is_in(&self, lang: Language) -> bool {
        self.connective_outside(lang).is_none()
    }

    /// Variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Un(_, a) => a.collect_vars(out),
            Formula::Zero | Formula::One => {}
        }
    }
}

/// A finite map from variable names to formulas; identity elsewhere.
pub type Substitution = BTreeMap<String, Formula>;

/// Applies a substitution homomorphically.
pub fn apply_subst(s: &Substitution, f: &Formula) -> Formula {
    match f {
        Formula::Var(v) => s.get(v).cloned().unwrap_or_else(|| f.clone()),
        Formula::Zero | Formula::One => f.clone(),
        Formula::Bin(op, a, b) => Formula::Bin(*op, Box::new(apply_subst(s, a)), Box::new(apply_subst(s, b))),
        Formula::Un(op, a) => Formula::Un(*op, Box::new(apply_subst(s, a))),
    }
}

/// The mirror image: reverses fusion, swaps the implications and the negations.
///
/// `μ(a*b) = μb*μa`, `μ(a\b) = μb/μa`, `μ(b/a) = μa\μb`, `μ(rn a) = ln μa`;
/// variables, constants, `\/` and `/\` are preserved.
pub fn mirror_formula(f: &Formula) -> Formula {
    match f {
        Formula::Var(_) | Formula::Zero | Formula::One => f.clone(),
        Formula::Bin(op, a, b) => {
            let (ma, mb) = (mirror_formula(a), mirror_formula(b));
            match op {
                BinOp::Join => Formula::join(ma, mb),
                BinOp::Meet => Formula::meet(ma, mb),
                BinOp::Fus => Formula::fus(mb, ma),
                BinOp::Rimp => Formula::limp(ma, mb),
                BinOp::Limp => Formula::rimp(ma, mb),
            }
        }
        Formula::Un(UnOp::Rneg, a) => Formula::lneg(mirror_formula(a)),
        Formula::Un(UnOp::Lneg, a) => Formula::rneg(mirror_formula(a)),
    }
}

/// All subformulas of `f`, including `f` itself.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(f, &mut out);
    out
}

fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.clone()) {
        return;
    }
    match f {
        Formula::Bin(_, a, b) => {
            collect_subformulas(a, out);
            collect_subformulas(b, out);
        }
        Formula::Un(_, a) => collect_subformulas(a, out),
        _ => {}
    }
}

// Precedence levels used by the printer, loosest first.
const LVL_IMP: u8 = 0;
const LVL_SUM: u8 = 1;
const LVL_MEET: u8 = 2;
const LVL_PROD: u8 = 3;
const LVL_ATOM: u8 = 4;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Bin(BinOp::Rimp | BinOp::Limp, _, _) => LVL_IMP,
        Formula::Bin(BinOp::Join, _, _) => LVL_SUM,
        Formula::Bin(BinOp::Meet, _, _) => LVL_MEET,
        Formula::Bin(BinOp::Fus, _, _) => LVL_PROD,
        _ => LVL_ATOM,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_formula(f, out)?;
        out.write_str(")")
    } else {
        write_formula(f, out)
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Var(v) => out.write_str(v),
        Formula::Zero => out.write_str("0"),
        Formula::One => out.write_str("1"),
        Formula::Un(op, a) => {
            out.write_str(match op {
                UnOp::Rneg => "rn(",
                UnOp::Lneg => "ln(",
            })?;
            write_formula(a, out)?;
            out.write_str(")")
        }
        Formula::Bin(op, a, b) => match op {
            // Left-associative chains: the right operand must bind tighter.
            BinOp::Join => {
                write_at(a, LVL_SUM, out)?;
                out.write_str(" \\/ ")?;
                write_at(b, LVL_MEET, out)
            }
            BinOp::Meet => {
                write_at(a, LVL_MEET, out)?;
                out.write_str(" /\\ ")?;
                write_at(b, LVL_PROD, out)
            }
            BinOp::Fus => {
                write_at(a, LVL_PROD, out)?;
                out.write_str(" * ")?;
                write_at(b, LVL_ATOM, out)
            }
            // Implications are non-associative.
            BinOp::Rimp => {
                write_at(a, LVL_SUM, out)?;
                out.write_str(" \\ ")?;
                write_at(b, LVL_SUM, out)
            }
            BinOp::Limp => {
                write_at(b, LVL_SUM, out)?;
                out.write_str(" / ")?;
                write_at(a, LVL_SUM, out)
            }
        },
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

/// Errors produced by [`parse_formula`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// The text does not follow the grammar.
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax {
        /// Byte offset of the offending token.
        pos: usize,
        /// What went wrong.
        msg: String,
    },
    /// A connective outside the requested language was used.
    #[error("{0} not in language")]
    NotInLanguage(Connective),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Join,
    Meet,
    Fus,
    Back,
    Slash,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::One => "`1`".into(),
            Tok::Join => "`\\/`".into(),
            Tok::Meet => "`/\\`".into(),
            Tok::Fus => "`*`".into(),
            Tok::Back => "`\\`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'\\' if bytes.get(i + 1) == Some(&b'/') => {
                i += 2;
                Tok::Join
            }
            b'/' if bytes.get(i + 1) == Some(&b'\\') => {
                i += 2;
                Tok::Meet
            }
            b'\\' => {
                i += 1;
                Tok::Back
            }
            b'/' => {
                i += 1;
                Tok::Slash
            }
            b'*' => {
                i += 1;
                Tok::Fus
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'0' | b'1' => {
                i += 1;
                if bytes.get(i).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
                    return Err(ParseError::Syntax { pos: start, msg: "constants are `0` and `1` only".into() });
                }
                if c == b'0' {
                    Tok::Zero
                } else {
                    Tok::One
                }
            }
            b'a'..=b'z' => {
                while i < bytes.len() && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { pos: start, msg: format!("unexpected character `{ch}`") });
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    lang: &'a Language,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn check(&self, c: Connective) -> Result<(), ParseError> {
        if self.lang.contains(c) {
            Ok(())
        } else {
            Err(ParseError::NotInLanguage(c))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.sum()?;
        if self.eat(&Tok::Back) {
            self.check(Connective::Rimp)?;
            let right = self.sum()?;
            self.forbid_chained_implication()?;
            Ok(Formula::rimp(left, right))
        } else if self.eat(&Tok::Slash) {
            self.check(Connective::Limp)?;
            let right = self.sum()?;
            self.forbid_chained_implication()?;
            // `left / right` has numerator `left`.
            Ok(Formula::limp(right, left))
        } else {
            Ok(left)
        }
    }

    fn forbid_chained_implication(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Back | Tok::Slash) => self.err("implications do not associate; add parentheses"),
            _ => Ok(()),
        }
    }

    fn sum(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.meetp()?;
        while self.eat(&Tok::Join) {
            self.check(Connective::Join)?;
            let rhs = self.meetp()?;
            acc = Formula::join(acc, rhs);
        }
        Ok(acc)
    }

    fn meetp(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.prod()?;
        while self.eat(&Tok::Meet) {
            self.check(Connective::Meet)?;
            let rhs = self.prod()?;
            acc = Formula::meet(acc, rhs);
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.atom()?;
        while self.eat(&Tok::Fus) {
            self.check(Connective::Fus)?;
            let rhs = self.atom()?;
            acc = Formula::fus(acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        match tok {
            Tok::Zero => {
                self.pos += 1;
                self.check(Connective::Zero)?;
                Ok(Formula::Zero)
            }
            Tok::One => {
                self.pos += 1;
                self.check(Connective::One)?;
                Ok(Formula::One)
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.imp()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let is_neg = (name == "rn" || name == "ln") && self.peek() == Some(&Tok::LParen);
                if !is_neg {
                    return Ok(Formula::Var(name));
                }
                self.pos += 1;
                let inner = self.imp()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                if name == "rn" {
                    self.check(Connective::Rneg)?;
                    Ok(Formula::rneg(inner))
                } else {
                    self.check(Connective::Lneg)?;
                    Ok(Formula::lneg(inner))
                }
            }
            other => self.err(format!("unexpected {}", other.describe())),
        }
    }
}

/// Parses a formula and checks that it lies in `lang`.
///
/// Precedence, tightest first: `rn(..)`/`ln(..)`, `*`, `/\`, `\/`, and the
/// non-associative implications `\` and `/`.
pub fn parse_formula(text: &str, lang: &Language) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), lang };
    let f = p.imp()?;
    if p.pos != p.toks.len() {
        let what = p.toks[p.pos].1.describe();
        return p.err(format!("unexpected {what}"));
    }
    Ok(f)
}

/// Parses a comma-separated list of formulas (possibly empty).
pub(crate) fn parse_formula_list(text: &str, lang: &Language, base: usize) -> Result<Vec<Formula>, ParseError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let shift = |e: ParseError, off: usize| match e {
        ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + off, msg },
        other => other,
    };
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(parse_formula(&text[start..i], lang).map_err(|e| shift(e, base + start))?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(parse_formula(&text[start..], lang).map_err(|e| shift(e, base + start))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s, &Language::full()).unwrap()
    }

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn parses_join() {
        assert_eq!(p("p \\/ q"), Formula::join(v("p"), v("q")));
    }

    #[test]
    fn parses_negated_product() {
        assert_eq!(p("rn(p * q)"), Formula::rneg(Formula::fus(v("p"), v("q"))));
    }

    #[test]
    fn rejects_connective_outside_language() {
        let err = parse_formula("p \\ q", &Language::core()).unwrap_err();
        assert_eq!(err, ParseError::NotInLanguage(Connective::Rimp));
        assert_eq!(err.to_string(), "rimp not in language");
    }

    #[test]
    fn precedence_ladder() {
        // * binds tighter than /\ which binds tighter than \/.
        assert_eq!(
            p("a \\/ b /\\ c * d"),
            Formula::join(v("a"), Formula::meet(v("b"), Formula::fus(v("c"), v("d"))))
        );
        assert_eq!(p("a * b \\ c"), Formula::rimp(Formula::fus(v("a"), v("b")), v("c")));
        assert_eq!(p("c / a"), Formula::limp(v("a"), v("c")));
    }

    #[test]
    fn chains_associate_left() {
        assert_eq!(p("a * b * c"), Formula::fus(Formula::fus(v("a"), v("b")), v("c")));
        assert_eq!(p("a \\/ b \\/ c"), Formula::join(Formula::join(v("a"), v("b")), v("c")));
    }

    #[test]
    fn mixed_implications_need_parentheses() {
        assert!(parse_formula("a \\ b / c", &Language::full()).is_err());
        assert!(parse_formula("a \\ b \\ c", &Language::full()).is_err());
        assert_eq!(p("a \\ (b / c)"), Formula::rimp(v("a"), Formula::limp(v("c"), v("b"))));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_formula("p * )", &Language::full()) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("", &Language::full()).is_err());
        assert!(parse_formula("P", &Language::full()).is_err());
        assert!(parse_formula("(p", &Language::full()).is_err());
    }

    #[test]
    fn rn_without_parenthesis_is_a_variable() {
        assert_eq!(p("rn"), v("rn"));
        assert_eq!(p("ln * x1_y"), Formula::fus(v("ln"), v("x1_y")));
    }

    #[test]
    fn printer_round_trips_examples() {
        for s in [
            "p \\/ q",
            "(p \\/ q) * r",
            "p * (q * r)",
            "p \\ (q \\ r)",
            "(p \\ q) \\ r",
            "q / p",
            "rn(p) * ln(q \\/ 0)",
            "p \\/ (q \\/ r)",
            "p /\\ (q /\\ r) \\/ 1",
        ] {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s}");
        }
        assert_eq!(p("(p \\/ q) * r").to_string(), "(p \\/ q) * r");
    }

    #[test]
    fn mirror_swaps_implications() {
        assert_eq!(mirror_formula(&p("p \\ q")), Formula::limp(v("p"), v("q")));
        assert_eq!(mirror_formula(&p("p \\ q")).to_string(), "q / p");
    }

    #[test]
    fn mirror_reverses_fusion_and_swaps_negations() {
        assert_eq!(mirror_formula(&p("p * rn(q)")), Formula::fus(Formula::lneg(v("q")), v("p")));
    }

    #[test]
    fn substitution_examples() {
        let mut s = Substitution::new();
        s.insert("p".into(), v("q"));
        assert_eq!(apply_subst(&s, &v("p")), v("q"));
        assert_eq!(apply_subst(&Substitution::new(), &p("p * q")), p("p * q"));
        let mut z = Substitution::new();
        z.insert("p".into(), Formula::Zero);
        assert_eq!(apply_subst(&z, &p("p \\/ 1")), Formula::join(Formula::Zero, Formula::One));
    }

    #[test]
    fn subformula_examples() {
        assert_eq!(subformulas(&v("p")), BTreeSet::from([v("p")]));
        assert_eq!(subformulas(&p("p * q")), BTreeSet::from([v("p"), v("q"), p("p * q")]));
        assert_eq!(subformulas(&p("rn(p)")), BTreeSet::from([v("p"), p("rn(p)")]));
    }

    #[test]
    fn language_parsing() {
        assert_eq!(Language::parse("core-meet").unwrap(), Language::core_meet());
        assert_eq!(Language::parse("join,fus,zero,one,meet").unwrap(), Language::core_meet());
        assert!(matches!(Language::parse("join,fus"), Err(LanguageError::MissingCore(_))));
        assert!(Language::parse("nope").is_err());
        assert_eq!(Language::full().to_string(), "full");
    }
}
