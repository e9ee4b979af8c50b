//! Sequents with at most one succedent formula, equations, and the
//! translations between them.
//!
//! * [`tau`] sends a sequent `Γ ⇒ Δ` to the equation `∏Γ ⪯ δ`
//!   (written `∏Γ ∨ δ ≈ δ`), where `δ` is the succedent or `0`;
//! * [`rho`] sends `φ ≈ ψ` to the sequents `φ ⇒ ψ` and `ψ ⇒ φ`;
//! * [`tau_prime`] folds a sequent into a single formula with `\`;
//! * [`rho_prime`] sends `φ` to `∅ ⇒ φ`.
//!
//! ```
//! use substrukt::sequents::{parse_sequent, tau};
//! use substrukt::syntax::Language;
//!
//! let s = parse_sequent("p, q => r", &Language::core()).unwrap();
//! let eqs: Vec<String> = tau(&s).iter().map(|e| e.to_string()).collect();
//! assert_eq!(eqs, vec!["p * q \\/ r = r"]);
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{mirror_formula, parse_formula_list, Formula, Language, ParseError};

/// A sequent `Γ ⇒ Δ` whose succedent holds zero or one formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    /// The antecedent sequence `Γ`.
    pub ante: Vec<Formula>,
    /// The succedent: `None` for the empty succedent.
    pub succ: Option<Formula>,
}

impl Sequent {
    /// Builds a sequent.
    pub fn new(ante: Vec<Formula>, succ: Option<Formula>) -> Sequent {
        Sequent { ante, succ }
    }

    /// `ante ⇒ succ` with a nonempty succedent.
    pub fn to(ante: Vec<Formula>, succ: Formula) -> Sequent {
        Sequent { ante, succ: Some(succ) }
    }

    /// `ante ⇒ ∅`.
    pub fn to_empty(ante: Vec<Formula>) -> Sequent {
        Sequent { ante, succ: None }
    }

    /// Every formula of the sequent, antecedent first.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.ante.iter().chain(self.succ.iter())
    }

    /// Whether all formulas lie in `lang`.
    pub fn is_in(&self, lang: Language) -> bool {
        self.formulas().all(|f| f.is_in(lang))
    }

    /// Variables occurring anywhere in the sequent.
    pub fn vars(&self) -> BTreeSet<String> {
        self.formulas().flat_map(|f| f.vars()).collect()
    }

    /// Total number of syntax nodes.
    pub fn size(&self) -> usize {
        self.formulas().map(Formula::size).sum()
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ante: Vec<String> = self.ante.iter().map(|x| x.to_string()).collect();
        f.write_str(&ante.join(", "))?;
        if !self.ante.is_empty() {
            f.write_str(" ")?;
        }
        f.write_str("=>")?;
        if let Some(s) = &self.succ {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Parses `f1, f2 => g`, `f1 =>` or `=>`.
pub fn parse_sequent(text: &str, lang: &Language) -> Result<Sequent, ParseError> {
    let Some(arrow) = text.find("=>") else {
        return Err(ParseError::Syntax { pos: text.len(), msg: "expected `=>`".into() });
    };
    let ante = parse_formula_list(&text[..arrow], lang, 0)?;
    let rest = &text[arrow + 2..];
    let succ = parse_formula_list(rest, lang, arrow + 2)?;
    if succ.len() > 1 {
        return Err(ParseError::Syntax { pos: arrow + 2, msg: "at most one succedent formula".into() });
    }
    Ok(Sequent { ante, succ: succ.into_iter().next() })
}

/// An equation `lhs ≈ rhs`; the inequation `a ⪯ b` is `a ∨ b ≈ b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    /// Left-hand side.
    pub lhs: Formula,
    /// Right-hand side.
    pub rhs: Formula,
}

impl Equation {
    /// `lhs ≈ rhs`.
    pub fn new(lhs: Formula, rhs: Formula) -> Equation {
        Equation { lhs, rhs }
    }

    /// The inequation `a ⪯ b`, stored as `a ∨ b ≈ b`.
    pub fn leq(a: Formula, b: Formula) -> Equation {
        Equation { lhs: Formula::join(a, b.clone()), rhs: b }
    }

    /// Variables occurring on either side.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    /// The mirror image, side by side.
    pub fn mirror(&self) -> Equation {
        Equation { lhs: mirror_formula(&self.lhs), rhs: mirror_formula(&self.rhs) }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// `∏Γ`: `1` for the empty sequence, the formula itself for a singleton,
/// and the left-nested fusion `(φ0 * φ1) * …` otherwise.
pub fn fuse(gamma: &[Formula]) -> Formula {
    let mut it = gamma.iter();
    match it.next() {
        None => Formula::One,
        Some(first) => it.fold(first.clone(), |acc, f| Formula::fus(acc, f.clone())),
    }
}

/// The succedent formula, or `0` for the empty succedent.
pub fn succedent_or_zero(s: &Sequent) -> Formula {
    s.succ.clone().unwrap_or(Formula::Zero)
}

/// Sequent-to-equation translation: `{∏Γ ∨ δ ≈ δ}` with `δ` the succedent or `0`.
pub fn tau(s: &Sequent) -> BTreeSet<Equation> {
    BTreeSet::from([Equation::leq(fuse(&s.ante), succedent_or_zero(s))])
}

/// Equation-to-sequent translation: `{φ ⇒ ψ, ψ ⇒ φ}` (a set, so `φ ≈ φ` gives one sequent).
pub fn rho(e: &Equation) -> BTreeSet<Sequent> {
    BTreeSet::from([
        Sequent::to(vec![e.lhs.clone()], e.rhs.clone()),
        Sequent::to(vec![e.rhs.clone()], e.lhs.clone()),
    ])
}

/// Sequent-to-formula translation: `φm−1\(…\(φ0\δ))`, or `δ` when the antecedent is empty.
pub fn tau_prime(s: &Sequent) -> Formula {
    s.ante.iter().fold(succedent_or_zero(s), |acc, f| Formula::rimp(f.clone(), acc))
}

/// Formula-to-sequent translation: `∅ ⇒ φ`.
pub fn rho_prime(f: &Formula) -> Sequent {
    Sequent::to(Vec::new(), f.clone())
}

/// Mirror image of a sequent: antecedent reversed and mirrored, succedent mirrored.
pub fn mirror_sequent(s: &Sequent) -> Sequent {
    Sequent {
        ante: s.ante.iter().rev().map(mirror_formula).collect(),
        succ: s.succ.as_ref().map(mirror_formula),
    }
}
