//! Finite algebras in the language of the full Lambek calculus.
//!
//! Covers term evaluation, equational validity and variety membership for
//! pointed semilattice- and lattice-ordered monoids, their pseudocomplemented
//! expansions, and FL-algebras. It also derives residuals and
//! pseudocomplements from the order, builds opposite algebras, and enumerates
//! small algebras up to isomorphism.
//!
//! The order is always `a ≤ b` iff `a ∨ b = b`. Binary tables are indexed so
//! that `table[i][j]` is the value of the formula constructor applied to
//! `(i, j)`. In particular `limp[i][j]` is `limp(i, j) = j / i`.
//!
//! ```
//! use substrukt::algebra::{check_variety, fixtures, Family, VarietyId};
//! use substrukt::calculus::Sigma;
//!
//! let diamond = fixtures::diamond();
//! let report = check_variety(&diamond, &VarietyId::new(Family::Msl, Sigma::empty())).unwrap();
//! assert!(!report.holds());
//! ```

mod enumerate;
pub mod fixtures;
mod pomonoid;

pub use enumerate::{enumerate_algebras, EnumerateError, MAX_ENUMERATION_SIZE};
pub use pomonoid::{check_property_equivalences, random_po_monoid, PoMonoid, PropertyReport, PropertyRow};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::calculus::{CalculusId, Sigma};
use crate::sequents::Equation;
use crate::syntax::{parse_formula, BinOp, Connective, Formula, Language, UnOp};

/// A binary operation table.
pub type Table2 = Vec<Vec<usize>>;
/// A unary operation table.
pub type Table1 = Vec<usize>;

/// Errors raised while building or using an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// The carrier is empty.
    #[error("the carrier must be nonempty")]
    EmptyCarrier,
    /// Two elements share a name.
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    /// A table has the wrong shape.
    #[error("table `{op}` has the wrong shape")]
    Shape {
        /// Operation name.
        op: String,
    },
    /// A table entry or constant is not an element.
    #[error("`{op}` refers to `{value}`, which is not an element")]
    NotAnElement {
        /// Operation or constant name.
        op: String,
        /// The offending entry.
        value: String,
    },
    /// The join table is not a semilattice operation.
    #[error("join is not a semilattice operation: {0}")]
    NotASemilattice(String),
    /// A required operation is missing.
    #[error("{0} not in algebra")]
    OpNotInAlgebra(Connective),
    /// A variable has no value.
    #[error("variable `{0}` is unassigned")]
    Unassigned(String),
    /// Some residual does not exist.
    #[error("no maximum for {side} residual of ({a}, {b})")]
    NoMaximum {
        /// `right` (for `a\b`) or `left` (for `b/a`), or a negation name.
        side: &'static str,
        /// First argument.
        a: String,
        /// Second argument.
        b: String,
    },
    /// The order is not a lattice.
    #[error("no meet for ({0}, {1})")]
    NoMeet(String, String),
    /// Malformed JSON.
    #[error("invalid algebra JSON: {0}")]
    Json(String),
}

/// A finite algebra with a join, a fusion, constants `0` and `1`, and
/// optional meet, residuals and negations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    names: Vec<String>,
    join: Table2,
    fus: Table2,
    meet: Option<Table2>,
    rimp: Option<Table2>,
    limp: Option<Table2>,
    rneg: Option<Table1>,
    lneg: Option<Table1>,
    zero: usize,
    one: usize,
}

/// The optional operations of an algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtraOps {
    /// Meet table.
    pub meet: Option<Table2>,
    /// `rimp[a][b] = a \ b`.
    pub rimp: Option<Table2>,
    /// `limp[a][b] = b / a`.
    pub limp: Option<Table2>,
    /// Right negation table.
    pub rneg: Option<Table1>,
    /// Left negation table.
    pub lneg: Option<Table1>,
}

fn check_t2(op: &str, t: &Table2, n: usize, names: &[String]) -> Result<(), AlgebraError> {
    if t.len() != n || t.iter().any(|r| r.len() != n) {
        return Err(AlgebraError::Shape { op: op.into() });
    }
    if let Some(v) = t.iter().flatten().find(|&&v| v >= n) {
        let _ = names;
        return Err(AlgebraError::NotAnElement { op: op.into(), value: v.to_string() });
    }
    Ok(())
}

fn check_t1(op: &str, t: &Table1, n: usize) -> Result<(), AlgebraError> {
    if t.len() != n {
        return Err(AlgebraError::Shape { op: op.into() });
    }
    if let Some(v) = t.iter().find(|&&v| v >= n) {
        return Err(AlgebraError::NotAnElement { op: op.into(), value: v.to_string() });
    }
    Ok(())
}

impl FiniteAlgebra {
    /// Builds and validates an algebra.
    pub fn new(
        names: Vec<String>,
        join: Table2,
        fus: Table2,
        zero: usize,
        one: usize,
        extra: ExtraOps,
    ) -> Result<FiniteAlgebra, AlgebraError> {
        let n = names.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name) {
                return Err(AlgebraError::DuplicateName(name.clone()));
            }
        }
        check_t2("join", &join, n, &names)?;
        check_t2("fus", &fus, n, &names)?;
        for (op, t) in [("meet", &extra.meet), ("rimp", &extra.rimp), ("limp", &extra.limp)] {
            if let Some(t) = t {
                check_t2(op, t, n, &names)?;
            }
        }
        for (op, t) in [("rneg", &extra.rneg), ("lneg", &extra.lneg)] {
            if let Some(t) = t {
                check_t1(op, t, n)?;
            }
        }
        for (op, c) in [("zero", zero), ("one", one)] {
            if c >= n {
                return Err(AlgebraError::NotAnElement { op: op.into(), value: c.to_string() });
            }
        }
        for a in 0..n {
            if join[a][a] != a {
                return Err(AlgebraError::NotASemilattice(format!("{0} ∨ {0} ≠ {0}", names[a])));
            }
            for b in 0..n {
                if join[a][b] != join[b][a] {
                    return Err(AlgebraError::NotASemilattice(format!("{} ∨ {} is not commutative", names[a], names[b])));
                }
                for c in 0..n {
                    if join[join[a][b]][c] != join[a][join[b][c]] {
                        return Err(AlgebraError::NotASemilattice(format!(
                            "({} ∨ {}) ∨ {} is not associative",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteAlgebra {
            names,
            join,
            fus,
            meet: extra.meet,
            rimp: extra.rimp,
            limp: extra.limp,
            rneg: extra.rneg,
            lneg: extra.lneg,
            zero,
            one,
        })
    }

    /// Carrier size.
    pub fn size(&self) -> usize {
        self.names.len()
    }

    /// Element names, by index.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Name of element `i`.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Index of the element called `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The constant `0`.
    pub fn zero(&self) -> usize {
        self.zero
    }

    /// The constant `1`.
    pub fn one(&self) -> usize {
        self.one
    }

    /// `a ∨ b`.
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    /// `a * b`.
    pub fn fus(&self, a: usize, b: usize) -> usize {
        self.fus[a][b]
    }

    /// `a ∧ b`, if the algebra has a meet.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.meet.as_ref().map(|t| t[a][b])
    }

    /// `a \ b`, if present.
    pub fn rimp(&self, a: usize, b: usize) -> Option<usize> {
        self.rimp.as_ref().map(|t| t[a][b])
    }

    /// `b / a` (the value of `limp(a, b)`), if present.
    pub fn limp(&self, a: usize, b: usize) -> Option<usize> {
        self.limp.as_ref().map(|t| t[a][b])
    }

    /// Right negation of `a`, if present.
    pub fn rneg(&self, a: usize) -> Option<usize> {
        self.rneg.as_ref().map(|t| t[a])
    }

    /// Left negation of `a`, if present.
    pub fn lneg(&self, a: usize) -> Option<usize> {
        self.lneg.as_ref().map(|t| t[a])
    }

    /// The join table.
    pub fn join_table(&self) -> &Table2 {
        &self.join
    }

    /// The fusion table.
    pub fn fus_table(&self) -> &Table2 {
        &self.fus
    }

    /// The optional operations.
    pub fn extra_ops(&self) -> ExtraOps {
        ExtraOps {
            meet: self.meet.clone(),
            rimp: self.rimp.clone(),
            limp: self.limp.clone(),
            rneg: self.rneg.clone(),
            lneg: self.lneg.clone(),
        }
    }

    /// `a ≤ b`, i.e. `a ∨ b = b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.join[a][b] == b
    }

    /// Whether the algebra has the operation for `c`.
    pub fn has(&self, c: Connective) -> bool {
        match c {
            Connective::Join | Connective::Fus | Connective::Zero | Connective::One => true,
            Connective::Meet => self.meet.is_some(),
            Connective::Rimp => self.rimp.is_some(),
            Connective::Limp => self.limp.is_some(),
            Connective::Rneg => self.rneg.is_some(),
            Connective::Lneg => self.lneg.is_some(),
        }
    }

    /// The language of the algebra's operations.
    pub fn language(&self) -> Language {
        Language::new(Connective::ALL.iter().copied().filter(|c| self.has(*c))).expect("core always present")
    }

    /// The least element, if any.
    pub fn bottom(&self) -> Option<usize> {
        (0..self.size()).find(|&a| (0..self.size()).all(|b| self.leq(a, b)))
    }

    /// The greatest element (a finite join-semilattice always has one).
    pub fn top(&self) -> usize {
        (0..self.size()).fold(0, |acc, a| self.join[acc][a])
    }

    /// Join of a set of elements; `None` for the empty set without a bottom.
    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> Option<usize> {
        let mut it = xs.into_iter();
        match it.next() {
            Some(first) => Some(it.fold(first, |acc, x| self.join[acc][x])),
            None => self.bottom(),
        }
    }

    /// The reduct to the operations of `lang` (operations missing from the
    /// algebra stay missing).
    pub fn reduct(&self, lang: Language) -> FiniteAlgebra {
        let keep = |c: Connective| lang.contains(c);
        FiniteAlgebra {
            names: self.names.clone(),
            join: self.join.clone(),
            fus: self.fus.clone(),
            meet: self.meet.clone().filter(|_| keep(Connective::Meet)),
            rimp: self.rimp.clone().filter(|_| keep(Connective::Rimp)),
            limp: self.limp.clone().filter(|_| keep(Connective::Limp)),
            rneg: self.rneg.clone().filter(|_| keep(Connective::Rneg)),
            lneg: self.lneg.clone().filter(|_| keep(Connective::Lneg)),
            zero: self.zero,
            one: self.one,
        }
    }

    /// Renames elements.
    pub fn with_names(mut self, names: Vec<String>) -> Result<FiniteAlgebra, AlgebraError> {
        if names.len() != self.size() {
            return Err(AlgebraError::Shape { op: "elements".into() });
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(AlgebraError::DuplicateName(n.clone()));
            }
        }
        self.names = names;
        Ok(self)
    }

    /// Replaces the constant `0`.
    pub fn with_zero(mut self, zero: usize) -> FiniteAlgebra {
        assert!(zero < self.size());
        self.zero = zero;
        self
    }

    /// Replaces the optional operations.
    pub fn with_extra(self, extra: ExtraOps) -> Result<FiniteAlgebra, AlgebraError> {
        FiniteAlgebra::new(self.names, self.join, self.fus, self.zero, self.one, extra)
    }

    /// Serializes to the JSON algebra format.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(AlgebraJson::from(self)).expect("serializable")
    }

    /// Parses the JSON algebra format and re-validates every invariant.
    pub fn from_json(v: &Value) -> Result<FiniteAlgebra, AlgebraError> {
        let raw: AlgebraJson = serde_json::from_value(v.clone()).map_err(|e| AlgebraError::Json(e.to_string()))?;
        raw.into_algebra()
    }

    /// Parses JSON text.
    pub fn from_json_str(s: &str) -> Result<FiniteAlgebra, AlgebraError> {
        let v: Value = serde_json::from_str(s).map_err(|e| AlgebraError::Json(e.to_string()))?;
        FiniteAlgebra::from_json(&v)
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size();
        let width = self.names.iter().map(String::len).max().unwrap_or(1);
        writeln!(f, "elements: {}", self.names.join(" "))?;
        writeln!(f, "zero = {}, one = {}", self.names[self.zero], self.names[self.one])?;
        let mut t2 = |label: &str, t: &Table2| -> fmt::Result {
            write!(f, "{label:>width$} |")?;
            for b in 0..n {
                write!(f, " {:>width$}", self.names[b])?;
            }
            writeln!(f)?;
            for a in 0..n {
                write!(f, "{:>width$} |", self.names[a])?;
                for b in 0..n {
                    write!(f, " {:>width$}", self.names[t[a][b]])?;
                }
                writeln!(f)?;
            }
            Ok(())
        };
        t2("∨", &self.join)?;
        t2("*", &self.fus)?;
        if let Some(t) = &self.meet {
            t2("∧", t)?;
        }
        if let Some(t) = &self.rimp {
            t2("\\", t)?;
        }
        if let Some(t) = &self.limp {
            t2("/", t)?;
        }
        for (label, t) in [("rn", &self.rneg), ("ln", &self.lneg)] {
            if let Some(t) = t {
                let row: Vec<&str> = t.iter().map(|&v| self.names[v].as_str()).collect();
                writeln!(f, "{label}: {}", row.join(" "))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ConstsJson {
    zero: Value,
    one: Value,
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    elements: Vec<String>,
    consts: ConstsJson,
    ops: BTreeMap<String, Value>,
}

impl From<&FiniteAlgebra> for AlgebraJson {
    fn from(a: &FiniteAlgebra) -> Self {
        let name = |i: usize| Value::String(a.names[i].clone());
        let t2 = |t: &Table2| Value::Array(t.iter().map(|r| Value::Array(r.iter().map(|&v| name(v)).collect())).collect());
        let t1 = |t: &Table1| Value::Array(t.iter().map(|&v| name(v)).collect());
        let mut ops = BTreeMap::new();
        ops.insert("join".to_string(), t2(&a.join));
        ops.insert("fus".to_string(), t2(&a.fus));
        if let Some(t) = &a.meet {
            ops.insert("meet".to_string(), t2(t));
        }
        if let Some(t) = &a.rimp {
            ops.insert("rimp".to_string(), t2(t));
        }
        if let Some(t) = &a.limp {
            ops.insert("limp".to_string(), t2(t));
        }
        if let Some(t) = &a.rneg {
            ops.insert("rneg".to_string(), t1(t));
        }
        if let Some(t) = &a.lneg {
            ops.insert("lneg".to_string(), t1(t));
        }
        AlgebraJson { elements: a.names.clone(), consts: ConstsJson { zero: name(a.zero), one: name(a.one) }, ops }
    }
}

impl AlgebraJson {
    fn element(&self, op: &str, v: &Value) -> Result<usize, AlgebraError> {
        let bad = || AlgebraError::NotAnElement { op: op.into(), value: v.to_string() };
        match v {
            Value::String(s) => self.elements.iter().position(|e| e == s).ok_or_else(bad),
            Value::Number(n) => n.as_u64().map(|i| i as usize).filter(|&i| i < self.elements.len()).ok_or_else(bad),
            _ => Err(bad()),
        }
    }

    fn t2(&self, op: &str) -> Result<Option<Table2>, AlgebraError> {
        let Some(v) = self.ops.get(op) else { return Ok(None) };
        let rows = v.as_array().ok_or_else(|| AlgebraError::Shape { op: op.into() })?;
        rows.iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| AlgebraError::Shape { op: op.into() })?
                    .iter()
                    .map(|x| self.element(op, x))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn t1(&self, op: &str) -> Result<Option<Table1>, AlgebraError> {
        let Some(v) = self.ops.get(op) else { return Ok(None) };
        let row = v.as_array().ok_or_else(|| AlgebraError::Shape { op: op.into() })?;
        row.iter().map(|x| self.element(op, x)).collect::<Result<Vec<_>, _>>().map(Some)
    }

    fn into_algebra(self) -> Result<FiniteAlgebra, AlgebraError> {
        for k in self.ops.keys() {
            if !["join", "fus", "meet", "rimp", "limp", "rneg", "lneg"].contains(&k.as_str()) {
                return Err(AlgebraError::Json(format!("unknown operation `{k}`")));
            }
        }
        let join = self.t2("join")?.ok_or(AlgebraError::OpNotInAlgebra(Connective::Join))?;
        let fus = self.t2("fus")?.ok_or(AlgebraError::OpNotInAlgebra(Connective::Fus))?;
        let extra = ExtraOps {
            meet: self.t2("meet")?,
            rimp: self.t2("rimp")?,
            limp: self.t2("limp")?,
            rneg: self.t1("rneg")?,
            lneg: self.t1("lneg")?,
        };
        let zero = self.element("zero", &self.consts.zero)?;
        let one = self.element("one", &self.consts.one)?;
        FiniteAlgebra::new(self.elements, join, fus, zero, one, extra)
    }
}

/// A formula compiled against a fixed variable order, for fast repeated evaluation.
#[derive(Clone, Debug)]
enum Term {
    Var(usize),
    Zero,
    One,
    Bin(BinOp, Box<Term>, Box<Term>),
    Un(UnOp, Box<Term>),
}

impl Term {
    fn compile(f: &Formula, vars: &[String]) -> Term {
        match f {
            Formula::Var(v) => Term::Var(vars.iter().position(|x| x == v).expect("variable listed")),
            Formula::Zero => Term::Zero,
            Formula::One => Term::One,
            Formula::Bin(op, a, b) => Term::Bin(*op, Box::new(Term::compile(a, vars)), Box::new(Term::compile(b, vars))),
            Formula::Un(op, a) => Term::Un(*op, Box::new(Term::compile(a, vars))),
        }
    }

    fn eval(&self, a: &FiniteAlgebra, env: &[usize]) -> usize {
        match self {
            Term::Var(i) => env[*i],
            Term::Zero => a.zero,
            Term::One => a.one,
            Term::Bin(op, x, y) => {
                let (x, y) = (x.eval(a, env), y.eval(a, env));
                let t = match op {
                    BinOp::Join => &a.join,
                    BinOp::Fus => &a.fus,
                    BinOp::Meet => a.meet.as_ref().expect("checked"),
                    BinOp::Rimp => a.rimp.as_ref().expect("checked"),
                    BinOp::Limp => a.limp.as_ref().expect("checked"),
                };
                t[x][y]
            }
            Term::Un(op, x) => {
                let x = x.eval(a, env);
                match op {
                    UnOp::Rneg => a.rneg.as_ref().expect("checked")[x],
                    UnOp::Lneg => a.lneg.as_ref().expect("checked")[x],
                }
            }
        }
    }
}

fn require_ops(a: &FiniteAlgebra, f: &Formula) -> Result<(), AlgebraError> {
    match f.connectives().into_iter().find(|c| !a.has(*c)) {
        Some(c) => Err(AlgebraError::OpNotInAlgebra(c)),
        None => Ok(()),
    }
}

/// An assignment of elements (by index) to variable names.
pub type Assignment = BTreeMap<String, usize>;

/// Evaluates `t` under `assignment`.
pub fn eval_term(a: &FiniteAlgebra, t: &Formula, assignment: &Assignment) -> Result<usize, AlgebraError> {
    require_ops(a, t)?;
    let vars: Vec<String> = t.vars().into_iter().collect();
    let mut env = Vec::with_capacity(vars.len());
    for v in &vars {
        let val = *assignment.get(v).ok_or_else(|| AlgebraError::Unassigned(v.clone()))?;
        if val >= a.size() {
            return Err(AlgebraError::NotAnElement { op: v.clone(), value: val.to_string() });
        }
        env.push(val);
    }
    Ok(Term::compile(t, &vars).eval(a, &env))
}

/// Calls `visit` on every assignment of `k` variables over `n` elements, stopping when it returns `true`.
fn for_each_assignment(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    let mut env = vec![0; k];
    loop {
        if visit(&env) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            env[i] += 1;
            if env[i] < n {
                break;
            }
            env[i] = 0;
            i += 1;
        }
    }
}

/// The first assignment (in odometer order) satisfying every premise but
/// failing the conclusion, if any.
pub fn find_violation(a: &FiniteAlgebra, premises: &[Equation], conclusion: &Equation) -> Result<Option<Assignment>, AlgebraError> {
    let mut vars = BTreeSet::new();
    for e in premises.iter().chain(std::iter::once(conclusion)) {
        require_ops(a, &e.lhs)?;
        require_ops(a, &e.rhs)?;
        vars.extend(e.vars());
    }
    let vars: Vec<String> = vars.into_iter().collect();
    let compile = |e: &Equation| (Term::compile(&e.lhs, &vars), Term::compile(&e.rhs, &vars));
    let prem: Vec<(Term, Term)> = premises.iter().map(compile).collect();
    let (cl, cr) = compile(conclusion);
    let mut witness = None;
    for_each_assignment(a.size(), vars.len(), |env| {
        if prem.iter().all(|(l, r)| l.eval(a, env) == r.eval(a, env)) && cl.eval(a, env) != cr.eval(a, env) {
            witness = Some(vars.iter().cloned().zip(env.iter().copied()).collect());
            true
        } else {
            false
        }
    });
    Ok(witness)
}

/// Whether `a ⊨ e` for every assignment.
pub fn satisfies_equation(a: &FiniteAlgebra, e: &Equation) -> Result<bool, AlgebraError> {
    Ok(find_violation(a, &[], e)?.is_none())
}

/// Whether `a` satisfies the quasi-equation `premises ⊃ conclusion`.
pub fn satisfies_quasi(a: &FiniteAlgebra, premises: &[Equation], conclusion: &Equation) -> Result<bool, AlgebraError> {
    Ok(find_violation(a, premises, conclusion)?.is_none())
}

/// The algebra families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Pointed semilattice-ordered monoids, `⟨∨, *, 0, 1⟩`.
    Msl,
    /// Pointed lattice-ordered monoids, adding `∧`.
    Ml,
    /// Pseudocomplemented pointed sl-monoids, adding both negations.
    PMsl,
    /// Pseudocomplemented pointed ℓ-monoids.
    PMl,
    /// FL-algebras (pointed residuated lattices with negations).
    FL,
    /// Residuated lattices (no `0`, no negations).
    RL,
}

impl Family {
    /// Every family.
    pub const ALL: [Family; 6] = [Family::Msl, Family::Ml, Family::PMsl, Family::PMl, Family::FL, Family::RL];

    /// Short name.
    pub fn name(self) -> &'static str {
        match self {
            Family::Msl => "Msl",
            Family::Ml => "Ml",
            Family::PMsl => "PMsl",
            Family::PMl => "PMl",
            Family::FL => "FL",
            Family::RL => "RL",
        }
    }

    /// Parses a short name (case-insensitive).
    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.name().eq_ignore_ascii_case(s))
    }

    /// The operations an algebra of the family must have.
    pub fn language(self) -> Language {
        match self {
            Family::Msl => Language::core(),
            Family::Ml => Language::core_meet(),
            Family::PMsl => Language::core_neg(),
            Family::PMl => Language::core_meet_neg(),
            Family::FL => Language::full(),
            Family::RL => Language::core_meet().with(Connective::Rimp).with(Connective::Limp),
        }
    }

    /// The family whose sequent calculus lives over `lang`.
    pub fn for_language(lang: Language) -> Family {
        let neg = lang.contains(Connective::Rneg) || lang.contains(Connective::Lneg);
        if lang.contains(Connective::Rimp) || lang.contains(Connective::Limp) {
            Family::FL
        } else {
            match (lang.contains(Connective::Meet), neg) {
                (false, false) => Family::Msl,
                (true, false) => Family::Ml,
                (false, true) => Family::PMsl,
                (true, true) => Family::PMl,
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A variety `𝕂_σ`: a family plus the structural equations of `σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarietyId {
    /// The family.
    pub family: Family,
    /// The structural rules, as equations.
    pub sigma: Sigma,
}

impl VarietyId {
    /// Builds a variety identifier.
    pub fn new(family: Family, sigma: Sigma) -> VarietyId {
        VarietyId { family, sigma }
    }

    /// The variety that algebraizes `cal`.
    pub fn for_calculus(cal: &CalculusId) -> VarietyId {
        VarietyId { family: Family::for_language(cal.lang), sigma: cal.sigma }
    }
}

impl fmt::Display for VarietyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.family, self.sigma)
    }
}

fn eq(lhs: &str, rhs: &str) -> Equation {
    let l = Language::full();
    Equation::new(parse_formula(lhs, &l).expect("basis term"), parse_formula(rhs, &l).expect("basis term"))
}

fn le(lhs: &str, rhs: &str) -> Equation {
    let l = Language::full();
    Equation::leq(parse_formula(lhs, &l).expect("basis term"), parse_formula(rhs, &l).expect("basis term"))
}

/// A named basis equation.
pub type BasisEquation = (&'static str, Equation);

fn semilattice() -> Vec<BasisEquation> {
    vec![
        ("join-idem", eq("x \\/ x", "x")),
        ("join-comm", eq("x \\/ y", "y \\/ x")),
        ("join-assoc", eq("(x \\/ y) \\/ z", "x \\/ (y \\/ z)")),
    ]
}

fn lattice() -> Vec<BasisEquation> {
    let mut v = semilattice();
    v.extend([
        ("meet-idem", eq("x /\\ x", "x")),
        ("meet-comm", eq("x /\\ y", "y /\\ x")),
        ("meet-assoc", eq("(x /\\ y) /\\ z", "x /\\ (y /\\ z)")),
        ("absorb-join", eq("x \\/ (x /\\ y)", "x")),
        ("absorb-meet", eq("x /\\ (x \\/ y)", "x")),
    ]);
    v
}

fn monoid() -> Vec<BasisEquation> {
    vec![
        ("fus-assoc", eq("(x * y) * z", "x * (y * z)")),
        ("unit-right", eq("x * 1", "x")),
        ("unit-left", eq("1 * x", "x")),
    ]
}

fn distributivity() -> Vec<BasisEquation> {
    vec![
        ("dist-left", eq("x * (y \\/ z)", "(x * y) \\/ (x * z)")),
        ("dist-right", eq("(x \\/ y) * z", "(x * z) \\/ (y * z)")),
    ]
}

fn pseudocomplement() -> Vec<BasisEquation> {
    vec![
        ("r1", eq("rn(1)", "0")),
        ("r2", le("1", "rn(0)")),
        ("r3", le("x * rn(y * x)", "rn(y)")),
        ("l1", eq("ln(1)", "0")),
        ("l2", le("1", "ln(0)")),
        ("l3", le("ln(x * y) * x", "ln(y)")),
        ("ra", le("rn(x \\/ y)", "rn(x)")),
        ("la", le("ln(x \\/ y)", "ln(x)")),
    ]
}

fn residuation() -> Vec<BasisEquation> {
    vec![
        ("3r", le("x * ((x \\ z) /\\ y)", "z")),
        ("3l", le("((z / x) /\\ y) * x", "z")),
        ("4r", le("y", "x \\ ((x * y) \\/ z)")),
        ("4l", le("y", "((y * x) \\/ z) / x")),
    ]
}

/// The equational basis of a family, as named equations.
pub fn basis(family: Family) -> Vec<BasisEquation> {
    let mut v = Vec::new();
    match family {
        Family::Msl => {
            v.extend(semilattice());
            v.extend(monoid());
            v.extend(distributivity());
        }
        Family::Ml => {
            v.extend(lattice());
            v.extend(monoid());
            v.extend(distributivity());
        }
        Family::PMsl => {
            v.extend(semilattice());
            v.extend(monoid());
            v.extend(distributivity());
            v.extend(pseudocomplement());
        }
        Family::PMl => {
            v.extend(lattice());
            v.extend(monoid());
            v.extend(distributivity());
            v.extend(pseudocomplement());
        }
        Family::RL => {
            v.extend(lattice());
            v.extend(monoid());
            v.extend(residuation());
        }
        Family::FL => {
            v.extend(lattice());
            v.extend(monoid());
            v.extend(residuation());
            v.push(("5r", eq("rn(x)", "x \\ 0")));
            v.push(("5l", eq("ln(x)", "0 / x")));
        }
    }
    v
}

/// The equations of the structural rules in `sigma`.
pub fn sigma_equations(sigma: Sigma) -> Vec<BasisEquation> {
    let mut v = Vec::new();
    if sigma.e {
        v.push(("e", eq("x * y", "y * x")));
    }
    if sigma.wl {
        v.push(("wl", eq("x \\/ 1", "1")));
    }
    if sigma.wr {
        v.push(("wr", eq("0 \\/ x", "x")));
    }
    if sigma.c {
        v.push(("c", eq("x \\/ (x * x)", "x * x")));
    }
    v
}

/// A violated basis equation with the first failing assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Name of the basis equation.
    pub name: &'static str,
    /// The equation.
    pub equation: Equation,
    /// Element names assigned to the variables.
    pub witness: BTreeMap<String, String>,
}

/// Result of [`check_variety`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyReport {
    /// The variety checked.
    pub variety: VarietyId,
    /// Every violated equation.
    pub violations: Vec<Violation>,
}

impl VarietyReport {
    /// Whether the algebra belongs to the variety.
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the family basis and the σ equations. Errors if an operation of
/// the family is missing from the algebra.
pub fn check_variety(a: &FiniteAlgebra, v: &VarietyId) -> Result<VarietyReport, AlgebraError> {
    if let Some(c) = v.family.language().connectives().into_iter().find(|c| !a.has(*c)) {
        return Err(AlgebraError::OpNotInAlgebra(c));
    }
    let mut violations = Vec::new();
    for (name, e) in basis(v.family).into_iter().chain(sigma_equations(v.sigma)) {
        if let Some(w) = find_violation(a, &[], &e)? {
            let witness = w.into_iter().map(|(k, i)| (k, a.names[i].clone())).collect();
            violations.push(Violation { name, equation: e, witness });
        }
    }
    Ok(VarietyReport { variety: *v, violations })
}

/// Whether `a` lies in `v` (missing operations count as "no").
pub fn in_variety(a: &FiniteAlgebra, v: &VarietyId) -> bool {
    check_variety(a, v).map(|r| r.holds()).unwrap_or(false)
}

/// The σ-flags the algebra satisfies (as a maximal `Sigma`).
pub fn satisfied_sigma(a: &FiniteAlgebra) -> Sigma {
    let holds = |s: Sigma| sigma_equations(s).iter().all(|(_, e)| satisfies_equation(a, e).unwrap_or(false));
    Sigma {
        e: holds(Sigma { e: true, ..Sigma::empty() }),
        wl: holds(Sigma { wl: true, ..Sigma::empty() }),
        wr: holds(Sigma { wr: true, ..Sigma::empty() }),
        c: holds(Sigma { c: true, ..Sigma::empty() }),
    }
}

fn maximum(a: &FiniteAlgebra, set: &[usize]) -> Option<usize> {
    set.iter().copied().find(|&m| set.iter().all(|&x| a.leq(x, m)))
}

/// Adds the meet table of the order. Fails if some pair has no greatest lower bound.
pub fn derive_meet(a: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    let n = a.size();
    let mut t = vec![vec![0; n]; n];
    for x in 0..n {
        for y in 0..n {
            let lower: Vec<usize> = (0..n).filter(|&z| a.leq(z, x) && a.leq(z, y)).collect();
            t[x][y] = maximum(a, &lower).ok_or_else(|| AlgebraError::NoMeet(a.names[x].clone(), a.names[y].clone()))?;
        }
    }
    let mut extra = a.extra_ops();
    extra.meet = Some(t);
    a.clone().with_extra(extra)
}

/// Adds `\` and `/` as the maxima `a\b = max{x : a*x ≤ b}` and
/// `b/a = max{x : x*a ≤ b}`. Fails at the first pair lacking a maximum.
pub fn derive_residuals(a: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    let n = a.size();
    let mut r = vec![vec![0; n]; n];
    let mut l = vec![vec![0; n]; n];
    for x in 0..n {
        for y in 0..n {
            let rs: Vec<usize> = (0..n).filter(|&z| a.leq(a.fus(x, z), y)).collect();
            r[x][y] = maximum(a, &rs).ok_or_else(|| AlgebraError::NoMaximum {
                side: "right",
                a: a.names[x].clone(),
                b: a.names[y].clone(),
            })?;
            let ls: Vec<usize> = (0..n).filter(|&z| a.leq(a.fus(z, x), y)).collect();
            l[x][y] = maximum(a, &ls).ok_or_else(|| AlgebraError::NoMaximum {
                side: "left",
                a: a.names[x].clone(),
                b: a.names[y].clone(),
            })?;
        }
    }
    let mut extra = a.extra_ops();
    extra.rimp = Some(r);
    extra.limp = Some(l);
    a.clone().with_extra(extra)
}

/// Adds the negations `rn(x) = max{z : x*z ≤ 0}` and `ln(x) = max{z : z*x ≤ 0}`.
pub fn derive_pseudocomplements(a: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    let n = a.size();
    let z0 = a.zero;
    let mut r = vec![0; n];
    let mut l = vec![0; n];
    for x in 0..n {
        let rs: Vec<usize> = (0..n).filter(|&z| a.leq(a.fus(x, z), z0)).collect();
        r[x] = maximum(a, &rs).ok_or_else(|| AlgebraError::NoMaximum {
            side: "rneg",
            a: a.names[x].clone(),
            b: a.names[z0].clone(),
        })?;
        let ls: Vec<usize> = (0..n).filter(|&z| a.leq(a.fus(z, x), z0)).collect();
        l[x] = maximum(a, &ls).ok_or_else(|| AlgebraError::NoMaximum {
            side: "lneg",
            a: a.names[x].clone(),
            b: a.names[z0].clone(),
        })?;
    }
    let mut extra = a.extra_ops();
    extra.rneg = Some(r);
    extra.lneg = Some(l);
    a.clone().with_extra(extra)
}

/// Expands an `⟨∨, *, 0, 1⟩`-algebra to a full FL-algebra by deriving meet,
/// residuals and negations (`rn(x) = x\0`, `ln(x) = 0/x`).
pub fn derive_fl(a: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    let b = derive_residuals(&derive_meet(a)?)?;
    let n = b.size();
    let mut extra = b.extra_ops();
    extra.rneg = Some((0..n).map(|x| b.rimp(x, b.zero).expect("derived")).collect());
    extra.lneg = Some((0..n).map(|x| b.limp(x, b.zero).expect("derived")).collect());
    b.with_extra(extra)
}

/// The opposite algebra: fusion transposed, the residuals and the negations swapped.
pub fn opposite(a: &FiniteAlgebra) -> FiniteAlgebra {
    let n = a.size();
    let fus = (0..n).map(|x| (0..n).map(|y| a.fus[y][x]).collect()).collect();
    FiniteAlgebra {
        names: a.names.clone(),
        join: a.join.clone(),
        fus,
        meet: a.meet.clone(),
        rimp: a.limp.clone(),
        limp: a.rimp.clone(),
        rneg: a.lneg.clone(),
        lneg: a.rneg.clone(),
        zero: a.zero,
        one: a.one,
    }
}
