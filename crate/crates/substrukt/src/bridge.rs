//! The link between sequent calculi and their algebras: countermodel search,
//! semantic consequence, filters in slice form, Leibniz congruences, and the
//! correspondence between filters and relative congruences.
//!
//! A filter of a sequent calculus on a finite algebra is a set of element
//! tuples `(x̄, δ)` closed under every rule. A sequent `Γ ⇒ δ` holds exactly
//! when `∏Γ ⇒ δ` holds, so a filter is determined by two slices:
//!
//! * `s1`, the pairs `(x, y)` with `x ⇒ y`;
//! * `s0`, the elements `x` with `x ⇒`.
//!
//! ```
//! use substrukt::algebra::{Family, VarietyId};
//! use substrukt::bridge::{countermodel, CountermodelResult};
//! use substrukt::calculus::Sigma;
//! use substrukt::sequents::parse_sequent;
//! use substrukt::syntax::Language;
//!
//! let s = parse_sequent("p => p * p", &Language::core()).unwrap();
//! let v = VarietyId::new(Family::Msl, Sigma::empty());
//! match countermodel(&s, &v, 3).unwrap() {
//!     CountermodelResult::Found(w) => assert_eq!(w.algebra.size(), 3),
//!     CountermodelResult::NotFound => panic!("expected a countermodel"),
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{
    check_variety, enumerate_algebras, find_violation, AlgebraError, Assignment, EnumerateError, ExtraOps, FiniteAlgebra,
    VarietyId,
};
use crate::calculus::{CalculusId, RuleId};
use crate::sequents::{tau, Equation, Sequent};

/// Default antecedent length up to which slice closure is checked.
pub const DEFAULT_TUPLE_LENGTH: usize = 3;

/// Largest carrier for [`filter_congruence_correspondence`].
pub const MAX_CORRESPONDENCE_SIZE: usize = 4;

/// Errors raised by this module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    /// The sequent uses a connective the variety lacks.
    #[error("the sequent is not in the language of {0}")]
    NotInLanguage(VarietyId),
    /// Enumeration failed.
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    /// Evaluation failed.
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    /// The carrier is too large for the requested operation.
    #[error("carrier of size {size} exceeds the limit {max}")]
    TooLarge {
        /// Carrier size.
        size: usize,
        /// Limit.
        max: usize,
    },
}

type Cache = Mutex<HashMap<(VarietyId, usize), Arc<Vec<FiniteAlgebra>>>>;

/// [`enumerate_algebras`], memoized for the lifetime of the process.
pub fn algebras_of(v: &VarietyId, n: usize) -> Result<Arc<Vec<FiniteAlgebra>>, EnumerateError> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&(*v, n)) {
        return Ok(hit.clone());
    }
    let all = Arc::new(enumerate_algebras(v, n)?);
    cache.lock().expect("cache lock").insert((*v, n), all.clone());
    Ok(all)
}

/// A finite algebra with an assignment that falsifies something.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    /// The algebra.
    pub algebra: FiniteAlgebra,
    /// Values of the variables.
    pub assignment: Assignment,
}

impl Countermodel {
    /// Assignment with element names.
    pub fn named_assignment(&self) -> BTreeMap<String, String> {
        self.assignment.iter().map(|(k, &v)| (k.clone(), self.algebra.name(v).to_string())).collect()
    }

    /// `{"algebra": …, "assignment": {var: element}}`.
    pub fn to_json(&self) -> Value {
        json!({ "algebra": self.algebra.to_json(), "assignment": self.named_assignment() })
    }
}

impl fmt::Display for Countermodel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.algebra)?;
        let parts: Vec<String> = self.named_assignment().into_iter().map(|(k, v)| format!("{k} ↦ {v}")).collect();
        writeln!(f, "assignment: {}", parts.join(", "))
    }
}

/// Outcome of [`countermodel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountermodelResult {
    /// An algebra of the variety and an assignment failing `τ(s)`.
    Found(Countermodel),
    /// No algebra up to the size bound fails `τ(s)`.
    NotFound,
}

fn tau_equation(s: &Sequent) -> Equation {
    tau(s).into_iter().next().expect("tau yields one equation")
}

fn check_language(v: &VarietyId, seqs: &[&Sequent]) -> Result<(), BridgeError> {
    if seqs.iter().all(|s| s.is_in(v.family.language())) {
        Ok(())
    } else {
        Err(BridgeError::NotInLanguage(*v))
    }
}

fn search(v: &VarietyId, max_size: usize, premises: &[Equation], goal: &Equation) -> Result<Option<Countermodel>, BridgeError> {
    for k in 1..=max_size {
        for a in algebras_of(v, k)?.iter() {
            if let Some(assignment) = find_violation(a, premises, goal)? {
                return Ok(Some(Countermodel { algebra: a.clone(), assignment }));
            }
        }
    }
    Ok(None)
}

/// Searches the algebras of `v` with at most `max_size` elements, smallest
/// first and in enumeration order, for a failure of `τ(s)`.
pub fn countermodel(s: &Sequent, v: &VarietyId, max_size: usize) -> Result<CountermodelResult, BridgeError> {
    check_language(v, &[s])?;
    Ok(match search(v, max_size, &[], &tau_equation(s))? {
        Some(w) => CountermodelResult::Found(w),
        None => CountermodelResult::NotFound,
    })
}

/// How far a bounded countermodel search can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// The variety has the finite embeddability property, so a large enough
    /// bound decides the question. A fixed bound is still only a bound.
    FiniteEmbeddability,
    /// No finiteness result applies; the search is a bounded refuter only.
    Bounded,
}

impl Regime {
    /// The regime that applies to `v`.
    pub fn of(v: &VarietyId) -> Regime {
        if v.sigma.wl {
            Regime::FiniteEmbeddability
        } else {
            Regime::Bounded
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::FiniteEmbeddability => "decidable (finite embeddability); bounded search",
            Regime::Bounded => "bounded refutation only",
        })
    }
}

/// Outcome of [`entails_semantically`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemanticVerdict {
    /// An algebra satisfying every hypothesis and failing the goal.
    Refuted(Countermodel),
    /// No countermodel with at most `n` elements.
    NoCountermodelUpTo {
        /// The size bound.
        n: usize,
        /// How much the absence of a countermodel means.
        regime: Regime,
    },
}

/// Checks the quasi-equation `τ[hyps] ⊃ τ(goal)` on every algebra of `v`
/// with at most `n` elements.
pub fn entails_semantically(
    hyps: &BTreeSet<Sequent>,
    goal: &Sequent,
    v: &VarietyId,
    n: usize,
) -> Result<SemanticVerdict, BridgeError> {
    let all: Vec<&Sequent> = hyps.iter().chain(std::iter::once(goal)).collect();
    check_language(v, &all)?;
    let premises: Vec<Equation> = hyps.iter().map(tau_equation).collect();
    Ok(match search(v, n, &premises, &tau_equation(goal))? {
        Some(w) => SemanticVerdict::Refuted(w),
        None => SemanticVerdict::NoCountermodelUpTo { n, regime: Regime::of(v) },
    })
}

/// A filter in slice form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FilterSlices {
    /// `s1[x][y]`: whether `x ⇒ y` is in the filter.
    pub s1: Vec<Vec<bool>>,
    /// `s0[x]`: whether `x ⇒` is in the filter.
    pub s0: Vec<bool>,
}

impl FilterSlices {
    /// The empty relation on `n` elements.
    pub fn empty(n: usize) -> FilterSlices {
        FilterSlices { s1: vec![vec![false; n]; n], s0: vec![false; n] }
    }

    /// The full relation on `n` elements.
    pub fn full(n: usize) -> FilterSlices {
        FilterSlices { s1: vec![vec![true; n]; n], s0: vec![true; n] }
    }

    /// Carrier size.
    pub fn size(&self) -> usize {
        self.s0.len()
    }

    /// Membership of an arbitrary tuple `(x̄, δ)`, via its product.
    pub fn contains(&self, a: &FiniteAlgebra, ante: &[usize], succ: Option<usize>) -> bool {
        let p = ante.iter().fold(a.one(), |acc, &x| a.fus(acc, x));
        match succ {
            Some(d) => self.s1[p][d],
            None => self.s0[p],
        }
    }

    /// Inclusion of filters.
    pub fn is_subset_of(&self, other: &FilterSlices) -> bool {
        let n = self.size();
        (0..n).all(|x| (!self.s0[x] || other.s0[x]) && (0..n).all(|y| !self.s1[x][y] || other.s1[x][y]))
    }

    fn insert(&mut self, a: &FiniteAlgebra, ante: &[usize], succ: Option<usize>) -> bool {
        let p = ante.iter().fold(a.one(), |acc, &x| a.fus(acc, x));
        let slot = match succ {
            Some(d) => &mut self.s1[p][d],
            None => &mut self.s0[p],
        };
        !std::mem::replace(slot, true)
    }
}

/// The filter of an algebra in the variety: `s1 = ≤` and `s0 = ↓0`.
pub fn canonical_filter(a: &FiniteAlgebra) -> FilterSlices {
    let n = a.size();
    FilterSlices {
        s1: (0..n).map(|x| (0..n).map(|y| a.leq(x, y)).collect()).collect(),
        s0: (0..n).map(|x| a.leq(x, a.zero())).collect(),
    }
}

/// A rule instance over elements whose premises are in the filter but whose
/// conclusion is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceViolation {
    /// The rule.
    pub rule: RuleId,
    /// Antecedent of the conclusion.
    pub ante: Vec<usize>,
    /// Succedent of the conclusion.
    pub succ: Option<usize>,
}

impl SliceViolation {
    /// Renders the conclusion with element names.
    pub fn show(&self, a: &FiniteAlgebra) -> String {
        let ante: Vec<&str> = self.ante.iter().map(|&x| a.name(x)).collect();
        let succ = self.succ.map(|d| a.name(d)).unwrap_or("");
        format!("{}: {} => {}", self.rule.name(), ante.join(", "), succ).trim_end().to_string()
    }
}

type Tuple = Vec<usize>;
type ElemSeq = (Tuple, Option<usize>);

fn tuples(n: usize, max_len: usize) -> Vec<Tuple> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let next: Vec<Tuple> = layer
            .iter()
            .flat_map(|t: &Tuple| {
                (0..n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn cat(parts: &[&[usize]]) -> Tuple {
    parts.concat()
}

/// Every instance `(rule, premises, conclusion)` over the elements of `a`
/// with all antecedents of length at most `max_len`. Rules whose connective
/// the algebra lacks are skipped.
fn element_instances(a: &FiniteAlgebra, cal: &CalculusId, max_len: usize, mut visit: impl FnMut(RuleId, &[ElemSeq], &ElemSeq) -> bool) {
    let n = a.size();
    // Membership only sees the product of each context block, and every rule
    // keeps its contexts contiguous, so from length 4 on (room for two
    // collapsed contexts around two active slots) single-element contexts
    // already produce every constraint that longer tuples would.
    let ts = tuples(n, if max_len >= 4 { 1 } else { max_len });
    let succs: Vec<Option<usize>> = std::iter::once(None).chain((0..n).map(Some)).collect();
    let els = 0..n;
    // Context pairs (Σ, Π) with room for `k` more formulas.
    let pairs = |k: usize| -> Vec<(&Tuple, &Tuple)> {
        ts.iter()
            .flat_map(|s| ts.iter().map(move |p| (s, p)))
            .filter(|(s, p)| s.len() + p.len() + k <= max_len)
            .collect()
    };
    let fits = |t: &Tuple| t.len() <= max_len;
    for rule in cal.rules() {
        if rule.connective().is_some_and(|c| !a.has(c)) {
            continue;
        }
        let mut go = |prem: Vec<ElemSeq>, concl: ElemSeq| -> bool {
            if prem.iter().all(|(t, _)| fits(t)) && fits(&concl.0) {
                visit(rule, &prem, &concl)
            } else {
                true
            }
        };
        macro_rules! run {
            ($e:expr) => {
                if !$e {
                    return;
                }
            };
        }
        match rule {
            RuleId::Axiom => {
                for x in els.clone() {
                    run!(go(vec![], (vec![x], Some(x))));
                }
            }
            RuleId::OneR => run!(go(vec![], (vec![], Some(a.one())))),
            RuleId::ZeroL => run!(go(vec![], (vec![a.zero()], None))),
            RuleId::Cut => {
                for g in &ts {
                    for x in els.clone() {
                        for (s, p) in pairs(g.len().max(1)) {
                            for &d in &succs {
                                run!(go(
                                    vec![(g.clone(), Some(x)), (cat(&[s, &[x], p]), d)],
                                    (cat(&[s, g, p]), d)
                                ));
                            }
                        }
                    }
                }
            }
            RuleId::OrL | RuleId::AndL1 | RuleId::AndL2 | RuleId::FusL | RuleId::OneL | RuleId::ExchL | RuleId::WeakL
            | RuleId::ContrL => {
                let k = if matches!(rule, RuleId::FusL | RuleId::ExchL | RuleId::ContrL) { 2 } else { 1 };
                for (s, p) in pairs(if rule == RuleId::OneL || rule == RuleId::WeakL { 1 } else { k }) {
                    for &d in &succs {
                        for x in els.clone() {
                            for y in els.clone() {
                                let with = |mid: &[usize]| cat(&[s, mid, p]);
                                let (prem, concl) = match rule {
                                    RuleId::OrL => (vec![(with(&[x]), d), (with(&[y]), d)], (with(&[a.join(x, y)]), d)),
                                    RuleId::AndL1 => (vec![(with(&[x]), d)], (with(&[a.meet(x, y).expect("has meet")]), d)),
                                    RuleId::AndL2 => (vec![(with(&[y]), d)], (with(&[a.meet(x, y).expect("has meet")]), d)),
                                    RuleId::FusL => (vec![(with(&[x, y]), d)], (with(&[a.fus(x, y)]), d)),
                                    RuleId::ExchL => (vec![(with(&[y, x]), d)], (with(&[x, y]), d)),
                                    RuleId::ContrL if x == y => (vec![(with(&[x, x]), d)], (with(&[x]), d)),
                                    RuleId::WeakL if y == 0 => (vec![(with(&[]), d)], (with(&[x]), d)),
                                    RuleId::OneL if x == 0 && y == 0 => (vec![(with(&[]), d)], (with(&[a.one()]), d)),
                                    _ => continue,
                                };
                                run!(go(prem, concl));
                            }
                        }
                    }
                }
            }
            RuleId::OrR1 | RuleId::OrR2 | RuleId::AndR | RuleId::WeakR | RuleId::ZeroR => {
                for g in &ts {
                    for x in els.clone() {
                        for y in els.clone() {
                            let (prem, concl) = match rule {
                                RuleId::OrR1 => (vec![(g.clone(), Some(x))], (g.clone(), Some(a.join(x, y)))),
                                RuleId::OrR2 => (vec![(g.clone(), Some(y))], (g.clone(), Some(a.join(x, y)))),
                                RuleId::AndR => (
                                    vec![(g.clone(), Some(x)), (g.clone(), Some(y))],
                                    (g.clone(), Some(a.meet(x, y).expect("has meet"))),
                                ),
                                RuleId::WeakR if y == 0 => (vec![(g.clone(), None)], (g.clone(), Some(x))),
                                RuleId::ZeroR if x == 0 && y == 0 => (vec![(g.clone(), None)], (g.clone(), Some(a.zero()))),
                                _ => continue,
                            };
                            run!(go(prem, concl));
                        }
                    }
                }
            }
            RuleId::FusR => {
                for g in &ts {
                    for p in &ts {
                        for x in els.clone() {
                            for y in els.clone() {
                                run!(go(
                                    vec![(g.clone(), Some(x)), (p.clone(), Some(y))],
                                    (cat(&[g, p]), Some(a.fus(x, y)))
                                ));
                            }
                        }
                    }
                }
            }
            RuleId::RimpL | RuleId::LimpL => {
                for g in &ts {
                    for (s, p) in pairs(g.len() + 1) {
                        for x in els.clone() {
                            for y in els.clone() {
                                for &d in &succs {
                                    let concl = if rule == RuleId::RimpL {
                                        cat(&[s, g, &[a.rimp(x, y).expect("has rimp")], p])
                                    } else {
                                        cat(&[s, &[a.limp(x, y).expect("has limp")], g, p])
                                    };
                                    run!(go(vec![(g.clone(), Some(x)), (cat(&[s, &[y], p]), d)], (concl, d)));
                                }
                            }
                        }
                    }
                }
            }
            RuleId::RimpR | RuleId::LimpR => {
                for g in &ts {
                    for x in els.clone() {
                        for y in els.clone() {
                            let (prem, val) = if rule == RuleId::RimpR {
                                (cat(&[&[x], g]), a.rimp(x, y).expect("has rimp"))
                            } else {
                                (cat(&[g, &[x]]), a.limp(x, y).expect("has limp"))
                            };
                            run!(go(vec![(prem, Some(y))], (g.clone(), Some(val))));
                        }
                    }
                }
            }
            RuleId::RnegL | RuleId::LnegL => {
                for g in &ts {
                    for x in els.clone() {
                        let concl = if rule == RuleId::RnegL {
                            cat(&[g, &[a.rneg(x).expect("has rneg")]])
                        } else {
                            cat(&[&[a.lneg(x).expect("has lneg")], g])
                        };
                        run!(go(vec![(g.clone(), Some(x))], (concl, None)));
                    }
                }
            }
            RuleId::RnegR | RuleId::LnegR => {
                for g in &ts {
                    for x in els.clone() {
                        let (prem, val) = if rule == RuleId::RnegR {
                            (cat(&[&[x], g]), a.rneg(x).expect("has rneg"))
                        } else {
                            (cat(&[g, &[x]]), a.lneg(x).expect("has lneg"))
                        };
                        run!(go(vec![(prem, None)], (g.clone(), Some(val))));
                    }
                }
            }
            RuleId::Hypothesis => {}
        }
    }
}

/// The rule instances (antecedents up to `max_len`) whose premises lie in
/// `r` but whose conclusion does not. At most `limit` violations are returned.
pub fn slice_closure_violations(
    a: &FiniteAlgebra,
    r: &FilterSlices,
    cal: &CalculusId,
    max_len: usize,
    limit: usize,
) -> Vec<SliceViolation> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    element_instances(a, cal, max_len, |rule, prem, concl| {
        if prem.iter().all(|(t, d)| r.contains(a, t, *d)) && !r.contains(a, &concl.0, concl.1) {
            out.push(SliceViolation { rule, ante: concl.0.clone(), succ: concl.1 });
        }
        out.len() < limit
    });
    out
}

/// The calculus whose filters live on algebras of `v`.
pub fn calculus_for(v: &VarietyId) -> CalculusId {
    CalculusId::new(v.sigma, v.family.language())
}

/// The least filter containing `seed`, by saturating under the rule
/// instances with antecedents up to `max_len`.
pub fn filter_closure(a: &FiniteAlgebra, seed: &FilterSlices, cal: &CalculusId, max_len: usize) -> FilterSlices {
    let mut r = seed.clone();
    loop {
        let mut changed = false;
        let snapshot = r.clone();
        element_instances(a, cal, max_len, |_, prem, concl| {
            if prem.iter().all(|(t, d)| snapshot.contains(a, t, *d)) && r.insert(a, &concl.0, concl.1) {
                changed = true;
            }
            true
        });
        if !changed {
            return r;
        }
    }
}

/// Every filter of `a`, by closing off the empty filter and then each filter
/// extended by one more slice entry. Sorted.
pub fn all_filters(a: &FiniteAlgebra, cal: &CalculusId, max_len: usize) -> Vec<FilterSlices> {
    let n = a.size();
    let mut found: BTreeSet<FilterSlices> = BTreeSet::new();
    let mut todo = vec![filter_closure(a, &FilterSlices::empty(n), cal, max_len)];
    while let Some(f) = todo.pop() {
        if !found.insert(f.clone()) {
            continue;
        }
        for x in 0..n {
            for d in std::iter::once(None).chain((0..n).map(Some)) {
                if !f.contains(a, &[x], d) {
                    let mut g = f.clone();
                    g.insert(a, &[x], d);
                    let g = filter_closure(a, &g, cal, max_len);
                    if !found.contains(&g) {
                        todo.push(g);
                    }
                }
            }
        }
    }
    found.into_iter().collect()
}

/// An equivalence relation on the carrier, as a class index per element.
/// Classes are numbered in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Congruence {
    /// `class[x]` is the class of `x`.
    pub class: Vec<usize>,
}

impl Congruence {
    /// Builds the partition from any labelling, renumbering classes canonically.
    pub fn from_labels(labels: &[usize]) -> Congruence {
        let mut map = BTreeMap::new();
        let class = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Congruence { class }
    }

    /// The identity relation.
    pub fn identity(n: usize) -> Congruence {
        Congruence { class: (0..n).collect() }
    }

    /// The total relation.
    pub fn total(n: usize) -> Congruence {
        Congruence { class: vec![0; n] }
    }

    /// Whether `x` and `y` are related.
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class[x] == self.class[y]
    }

    /// Number of classes.
    pub fn classes(&self) -> usize {
        self.class.iter().max().map_or(0, |m| m + 1)
    }

    /// Inclusion of relations.
    pub fn is_subset_of(&self, other: &Congruence) -> bool {
        let n = self.class.len();
        (0..n).all(|x| (0..n).all(|y| !self.related(x, y) || other.related(x, y)))
    }

    /// The first operation (with arguments) that does not respect the
    /// partition, if any.
    pub fn compatibility_violation(&self, a: &FiniteAlgebra) -> Option<String> {
        let n = a.size();
        let bins: [(&str, &dyn Fn(usize, usize) -> Option<usize>); 5] = [
            ("join", &|x, y| Some(a.join(x, y))),
            ("fus", &|x, y| Some(a.fus(x, y))),
            ("meet", &|x, y| a.meet(x, y)),
            ("rimp", &|x, y| a.rimp(x, y)),
            ("limp", &|x, y| a.limp(x, y)),
        ];
        for x in 0..n {
            for x2 in 0..n {
                if !self.related(x, x2) || x == x2 {
                    continue;
                }
                for (op, f) in [("rneg", a.rneg(x).zip(a.rneg(x2))), ("lneg", a.lneg(x).zip(a.lneg(x2)))] {
                    if let Some((u, v)) = f {
                        if !self.related(u, v) {
                            return Some(format!("{op}({}) vs {op}({})", a.name(x), a.name(x2)));
                        }
                    }
                }
                for y in 0..n {
                    for (op, f) in &bins {
                        let (Some(l1), Some(l2), Some(r1), Some(r2)) = (f(x, y), f(x2, y), f(y, x), f(y, x2)) else { continue };
                        if !self.related(l1, l2) || !self.related(r1, r2) {
                            return Some(format!("{op} at {} ~ {} with {}", a.name(x), a.name(x2), a.name(y)));
                        }
                    }
                }
            }
        }
        None
    }

    /// The quotient algebra. Requires compatibility.
    pub fn quotient(&self, a: &FiniteAlgebra) -> FiniteAlgebra {
        let k = self.classes();
        let rep: Vec<usize> = (0..k).map(|c| self.class.iter().position(|&d| d == c).expect("nonempty class")).collect();
        let names = (0..k)
            .map(|c| {
                let members: Vec<&str> = (0..a.size()).filter(|&x| self.class[x] == c).map(|x| a.name(x)).collect();
                format!("[{}]", members.join(","))
            })
            .collect();
        let t2 = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            (0..k).map(|i| (0..k).map(|j| self.class[f(rep[i], rep[j])]).collect()).collect()
        };
        let o2 = |f: &dyn Fn(usize, usize) -> Option<usize>| -> Option<Vec<Vec<usize>>> {
            f(0, 0)?;
            Some(t2(&|x, y| f(x, y).expect("total")))
        };
        let o1 = |f: &dyn Fn(usize) -> Option<usize>| -> Option<Vec<usize>> {
            f(0)?;
            Some((0..k).map(|i| self.class[f(rep[i]).expect("total")]).collect())
        };
        let extra = ExtraOps {
            meet: o2(&|x, y| a.meet(x, y)),
            rimp: o2(&|x, y| a.rimp(x, y)),
            limp: o2(&|x, y| a.limp(x, y)),
            rneg: o1(&|x| a.rneg(x)),
            lneg: o1(&|x| a.lneg(x)),
        };
        FiniteAlgebra::new(
            names,
            t2(&|x, y| a.join(x, y)),
            t2(&|x, y| a.fus(x, y)),
            self.class[a.zero()],
            self.class[a.one()],
            extra,
        )
        .expect("quotient of a compatible partition")
    }
}

fn partitions(n: usize) -> Vec<Congruence> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, k: usize, out: &mut Vec<Congruence>) {
        if i == n {
            out.push(Congruence { class: cur.clone() });
            return;
        }
        for c in 0..=k {
            cur.push(c);
            go(i + 1, n, cur, k.max(c + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Every congruence of `a` (partitions compatible with all its operations).
pub fn congruences(a: &FiniteAlgebra) -> Vec<Congruence> {
    partitions(a.size()).into_iter().filter(|c| c.compatibility_violation(a).is_none()).collect()
}

/// Every congruence whose quotient lies in `v`.
pub fn relative_congruences(a: &FiniteAlgebra, v: &VarietyId) -> Vec<Congruence> {
    congruences(a)
        .into_iter()
        .filter(|c| check_variety(&c.quotient(a), v).map(|r| r.holds()).unwrap_or(false))
        .collect()
}

/// Outcome of [`leibniz_congruence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeibnizResult {
    /// `Θ_R` is a congruence.
    Congruence(Congruence),
    /// `Θ_R` is not an equivalence or not compatible.
    NotACongruence(String),
}

/// `Θ_R = {(x, y) : x ⇒ y and y ⇒ x are both in R}`. For a filter closed under
/// cut this is the largest congruence compatible with `R`.
pub fn leibniz_congruence(a: &FiniteAlgebra, r: &FilterSlices) -> LeibnizResult {
    let n = a.size();
    let theta = |x: usize, y: usize| r.s1[x][y] && r.s1[y][x];
    for x in 0..n {
        if !theta(x, x) {
            return LeibnizResult::NotACongruence(format!("not reflexive at {}", a.name(x)));
        }
        for y in 0..n {
            for z in 0..n {
                if theta(x, y) && theta(y, z) && !theta(x, z) {
                    return LeibnizResult::NotACongruence(format!(
                        "not transitive at {}, {}, {}",
                        a.name(x),
                        a.name(y),
                        a.name(z)
                    ));
                }
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|x| (0..n).find(|&y| theta(x, y)).expect("reflexive")).collect();
    let c = Congruence::from_labels(&labels);
    match c.compatibility_violation(a) {
        Some(w) => LeibnizResult::NotACongruence(w),
        None => LeibnizResult::Congruence(c),
    }
}

/// Whether `c` is compatible with `r`: related elements are interchangeable
/// in every slice entry.
pub fn compatible_with(c: &Congruence, r: &FilterSlices) -> bool {
    let n = r.size();
    (0..n).all(|x| {
        (0..n).all(|x2| {
            !c.related(x, x2)
                || (r.s0[x] == r.s0[x2] && (0..n).all(|y| r.s1[x][y] == r.s1[x2][y] && r.s1[y][x] == r.s1[y][x2]))
        })
    })
}

/// Outcome of [`filter_congruence_correspondence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceReport {
    /// Number of filters.
    pub filters: usize,
    /// Number of relative congruences.
    pub congruences: usize,
    /// Problems found; empty means the Leibniz map is an order isomorphism.
    pub failures: Vec<String>,
}

impl CorrespondenceReport {
    /// Whether the correspondence holds.
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `R ↦ Θ_R` is an order isomorphism from the filters of the
/// calculus matching `v` onto the congruences of `a` relative to `v`.
/// Filters are computed with antecedents up to length 4, which is enough for
/// every rule once each context is collapsed to its product.
pub fn filter_congruence_correspondence(a: &FiniteAlgebra, v: &VarietyId) -> Result<CorrespondenceReport, BridgeError> {
    if a.size() > MAX_CORRESPONDENCE_SIZE {
        return Err(BridgeError::TooLarge { size: a.size(), max: MAX_CORRESPONDENCE_SIZE });
    }
    let filters = all_filters(a, &calculus_for(v), 4);
    let congs = relative_congruences(a, v);
    let mut failures = Vec::new();
    let mut images = Vec::new();
    for f in &filters {
        match leibniz_congruence(a, f) {
            LeibnizResult::Congruence(c) => {
                if !congs.contains(&c) {
                    failures.push(format!("Θ of a filter is not a relative congruence: {:?}", c.class));
                }
                images.push(c);
            }
            LeibnizResult::NotACongruence(w) => failures.push(format!("Θ of a filter is not a congruence: {w}")),
        }
    }
    if failures.is_empty() {
        let distinct: BTreeSet<&Congruence> = images.iter().collect();
        if distinct.len() != filters.len() {
            failures.push("Θ is not injective".into());
        }
        if distinct.len() != congs.len() {
            failures.push(format!("{} filters but {} relative congruences", filters.len(), congs.len()));
        }
        for (i, f) in filters.iter().enumerate() {
            for (j, g) in filters.iter().enumerate() {
                if f.is_subset_of(g) != images[i].is_subset_of(&images[j]) {
                    failures.push(format!("order not reflected between filters {i} and {j}"));
                }
            }
        }
    }
    Ok(CorrespondenceReport { filters: filters.len(), congruences: congs.len(), failures })
}
