//! Backward proof search.
//!
//! * [`prove`] is cut-free backward search. Without contraction it always
//!   terminates and decides derivability, since every backward step makes the
//!   goal strictly smaller. With contraction it is bounded by a depth limit and
//!   prunes goals that repeat an ancestor.
//! * [`prove_with_hyps`] admits hypotheses and cuts on subformulas. It is a
//!   bounded semidecision procedure, so it never answers "refuted".
//! * [`external_entails`] decides formula-level consequence. It runs
//!   [`prove_with_hyps`] on the sequents `∅ ⇒ ψ`, and it refutes only with a
//!   finite countermodel.
//!
//! When exchange is present, antecedents are handled as sorted multisets.
//! The returned proof trees still spell out every exchange step, so
//! [`check_proof`](crate::calculus::check_proof) accepts them as they are.
//!
//! ```
//! use substrukt::calculus::{CalculusId, Sigma};
//! use substrukt::search::{prove, Verdict};
//! use substrukt::sequents::parse_sequent;
//! use substrukt::syntax::Language;
//!
//! let lang = Language::core();
//! let goal = parse_sequent("p * q => q * p", &lang).unwrap();
//! assert!(matches!(prove(&goal, &CalculusId::new(Sigma::empty(), lang)), Verdict::Refuted { .. }));
//! let fl_e = CalculusId::new(Sigma::parse("e").unwrap(), lang);
//! assert!(matches!(prove(&goal, &fl_e), Verdict::Proved(_)));
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::calculus::{permute_proof, rule_instances_backward, CalculusId, ProofTree, RuleId, Sigma};
use crate::sequents::Sequent;
use crate::syntax::{subformulas, BinOp, Formula, UnOp};

/// Default depth bound for searches that can answer "unknown".
pub const DEFAULT_BOUND: usize = 12;

/// Default cap on antecedent length for sub-multiset enumeration.
pub const DEFAULT_SPLIT_CAP: usize = 10;

/// Tuning knobs for the searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximal number of nested rule applications (ignoring exchange steps)
    /// for bounded searches.
    pub bound: usize,
    /// Antecedents longer than this are split contiguously only, which makes
    /// refutations inconclusive.
    pub split_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { bound: DEFAULT_BOUND, split_cap: DEFAULT_SPLIT_CAP }
    }
}

/// Outcome of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A checkable proof.
    Proved(ProofTree),
    /// No proof exists. `caveat` is set when the refutation rests on the loop
    /// check under contraction rather than on a terminating exhaustive search.
    Refuted {
        /// Whether the refutation relies on the contraction loop check.
        caveat: bool,
    },
    /// The search gave up at the given depth bound.
    Unknown {
        /// The depth bound used.
        bound: usize,
    },
}

impl Verdict {
    /// `proved`, `refuted` or `unknown`.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Proved(_) => "proved",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    /// The proof, if any.
    pub fn proof(&self) -> Option<&ProofTree> {
        match self {
            Verdict::Proved(t) => Some(t),
            _ => None,
        }
    }

    /// Whether the verdict is [`Verdict::Proved`].
    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved(_))
    }

    /// Whether the verdict is [`Verdict::Refuted`].
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Why a branch failed, ordered by how little the failure says.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Fail {
    /// Exhaustive: no proof at any depth.
    Closed,
    /// Some branch was cut by the loop check.
    Loop,
    /// Some branch hit the depth bound.
    Bounded,
}

/// One backward step. `concl` is a rearrangement of the goal that matches
/// the rule schema exactly, so exchange steps may be needed to reach the goal.
struct Expansion {
    rule: RuleId,
    concl: Sequent,
    premises: Vec<Sequent>,
}

fn rank(rule: RuleId) -> u8 {
    use RuleId::*;
    match rule {
        Axiom | OneR | ZeroL | Hypothesis => 0,
        OrL | FusL | AndR | RimpR | LimpR | RnegR | LnegR | OneL | ZeroR => 1,
        OrR1 | OrR2 | AndL1 | AndL2 | FusR | RimpL | LimpL | RnegL | LnegL => 2,
        ExchL | WeakL | WeakR | ContrL => 3,
        Cut => 4,
    }
}

/// Rules whose premises are derivable whenever the conclusion is.
fn invertible(rule: RuleId) -> bool {
    rank(rule) == 1
}

fn sorted(mut v: Vec<Formula>) -> Vec<Formula> {
    v.sort();
    v
}

/// Every split of a sorted multiset into `(chosen, rest)`, both sorted, without duplicates.
fn sub_multisets(items: &[Formula]) -> Vec<(Vec<Formula>, Vec<Formula>)> {
    let mut groups: Vec<(&Formula, usize)> = Vec::new();
    for f in items {
        match groups.last_mut() {
            Some((g, n)) if *g == f => *n += 1,
            _ => groups.push((f, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for (f, n) in groups {
        let mut next = Vec::with_capacity(out.len() * (n + 1));
        for (chosen, rest) in &out {
            for k in 0..=n {
                let mut c = chosen.clone();
                let mut r = rest.clone();
                c.extend(std::iter::repeat(f.clone()).take(k));
                r.extend(std::iter::repeat(f.clone()).take(n - k));
                next.push((c, r));
            }
        }
        out = next;
    }
    out
}

struct Searcher<'a> {
    cal: &'a CalculusId,
    cfg: SearchConfig,
    multiset: bool,
    loop_check: bool,
    commit: bool,
    hyps: HashMap<Sequent, Sequent>,
    cut_formulas: Vec<Formula>,
    max_ante: usize,
    proved: HashMap<Sequent, ProofTree>,
    failed: HashMap<Sequent, usize>,
    truncated: bool,
}

impl<'a> Searcher<'a> {
    fn new(cal: &'a CalculusId, cfg: SearchConfig) -> Self {
        let s = cal.sigma;
        Searcher {
            cal,
            cfg,
            multiset: s.e,
            loop_check: s.c,
            // Without cut elimination (contraction alone) committing to invertible
            // rules is not justified for cut-free search.
            commit: s != Sigma { c: true, ..Sigma::empty() },
            hyps: HashMap::new(),
            cut_formulas: Vec::new(),
            max_ante: usize::MAX,
            proved: HashMap::new(),
            failed: HashMap::new(),
            truncated: false,
        }
    }

    fn normalize(&self, s: &Sequent) -> Sequent {
        if self.multiset {
            Sequent::new(sorted(s.ante.clone()), s.succ.clone())
        } else {
            s.clone()
        }
    }

    fn loop_key(&self, s: &Sequent) -> Sequent {
        // Runs of more than two adjacent copies count as two.
        let mut ante: Vec<Formula> = Vec::with_capacity(s.ante.len());
        for f in &s.ante {
            let n = ante.len();
            if n >= 2 && ante[n - 1] == *f && ante[n - 2] == *f {
                continue;
            }
            ante.push(f.clone());
        }
        Sequent::new(ante, s.succ.clone())
    }

    fn rearrange(&self, t: ProofTree, target: &Sequent) -> ProofTree {
        if t.conclusion == *target {
            t
        } else {
            permute_proof(t, target)
        }
    }

    fn expansions(&mut self, goal: &Sequent) -> Vec<Expansion> {
        let mut out = if self.multiset {
            self.multiset_expansions(goal)
        } else {
            rule_instances_backward(goal, self.cal)
                .into_iter()
                .filter(|(r, _)| *r != RuleId::ExchL)
                .map(|(rule, premises)| Expansion { rule, concl: goal.clone(), premises })
                .collect()
        };
        if !self.cut_formulas.is_empty() {
            self.cut_expansions(goal, &mut out);
        }
        if self.max_ante != usize::MAX {
            out.retain(|e| e.premises.iter().all(|p| p.ante.len() <= self.max_ante));
        }
        out.retain(|e| !e.premises.iter().any(|p| self.normalize(p) == *goal));
        out.sort_by_key(|e| rank(e.rule));
        out
    }

    fn splits(&mut self, items: &[Formula]) -> Vec<(Vec<Formula>, Vec<Formula>)> {
        if items.len() <= self.cfg.split_cap {
            sub_multisets(items)
        } else {
            self.truncated = true;
            (0..=items.len()).map(|k| (items[..k].to_vec(), items[k..].to_vec())).collect()
        }
    }

    fn multiset_expansions(&mut self, goal: &Sequent) -> Vec<Expansion> {
        let cal = self.cal;
        let g = &goal.ante;
        let d = &goal.succ;
        let mut out = Vec::new();
        let mut push = |rule: RuleId, concl: Sequent, premises: Vec<Sequent>| {
            if cal.has_rule(rule) {
                out.push(Expansion { rule, concl, premises });
            }
        };
        let cat = |a: &[Formula], b: &[Formula]| -> Vec<Formula> { a.iter().chain(b).cloned().collect() };
        let seq = |ante: Vec<Formula>| Sequent::new(ante, d.clone());

        if g.len() == 1 && d.as_ref() == Some(&g[0]) {
            push(RuleId::Axiom, goal.clone(), vec![]);
        }
        if g.is_empty() && *d == Some(Formula::One) {
            push(RuleId::OneR, goal.clone(), vec![]);
        }
        if g.len() == 1 && g[0] == Formula::Zero && d.is_none() {
            push(RuleId::ZeroL, goal.clone(), vec![]);
        }
        let mut split_cache: Option<Vec<(Vec<Formula>, Vec<Formula>)>> = None;
        for i in 0..g.len() {
            if i > 0 && g[i] == g[i - 1] {
                continue;
            }
            let f = &g[i];
            let rest: Vec<Formula> = g[..i].iter().chain(&g[i + 1..]).cloned().collect();
            let front = seq(cat(std::slice::from_ref(f), &rest));
            match f {
                Formula::Bin(BinOp::Join, a, b) => push(
                    RuleId::OrL,
                    front.clone(),
                    vec![seq(cat(&[(**a).clone()], &rest)), seq(cat(&[(**b).clone()], &rest))],
                ),
                Formula::Bin(BinOp::Meet, a, b) => {
                    push(RuleId::AndL1, front.clone(), vec![seq(cat(&[(**a).clone()], &rest))]);
                    push(RuleId::AndL2, front.clone(), vec![seq(cat(&[(**b).clone()], &rest))]);
                }
                Formula::Bin(BinOp::Fus, a, b) => {
                    push(RuleId::FusL, front.clone(), vec![seq(cat(&[(**a).clone(), (**b).clone()], &rest))]);
                }
                Formula::Bin(op @ (BinOp::Rimp | BinOp::Limp), phi, psi) => {
                    let rule = if *op == BinOp::Rimp { RuleId::RimpL } else { RuleId::LimpL };
                    if cal.has_rule(rule) {
                        let rest_splits = if rest.len() <= self.cfg.split_cap {
                            sub_multisets(&rest)
                        } else {
                            self.truncated = true;
                            (0..=rest.len()).map(|k| (rest[..k].to_vec(), rest[k..].to_vec())).collect()
                        };
                        for (s, r) in rest_splits {
                            let concl = if *op == BinOp::Rimp {
                                seq(cat(&cat(&s, std::slice::from_ref(f)), &r))
                            } else {
                                seq(cat(&cat(std::slice::from_ref(f), &s), &r))
                            };
                            push(
                                rule,
                                concl,
                                vec![Sequent::to(s, (**phi).clone()), seq(cat(&[(**psi).clone()], &r))],
                            );
                        }
                    }
                }
                Formula::Un(UnOp::Rneg, a) if d.is_none() => {
                    push(RuleId::RnegL, seq(cat(&rest, std::slice::from_ref(f))), vec![Sequent::to(rest.clone(), (**a).clone())]);
                }
                Formula::Un(UnOp::Lneg, a) if d.is_none() => {
                    push(RuleId::LnegL, front.clone(), vec![Sequent::to(rest.clone(), (**a).clone())]);
                }
                Formula::One => push(RuleId::OneL, front.clone(), vec![seq(rest.clone())]),
                _ => {}
            }
            push(RuleId::WeakL, front.clone(), vec![seq(rest.clone())]);
            push(RuleId::ContrL, front.clone(), vec![seq(cat(&[f.clone(), f.clone()], &rest))]);
        }
        match d {
            Some(Formula::Bin(BinOp::Join, a, b)) => {
                push(RuleId::OrR1, goal.clone(), vec![Sequent::to(g.clone(), (**a).clone())]);
                push(RuleId::OrR2, goal.clone(), vec![Sequent::to(g.clone(), (**b).clone())]);
            }
            Some(Formula::Bin(BinOp::Meet, a, b)) => push(
                RuleId::AndR,
                goal.clone(),
                vec![Sequent::to(g.clone(), (**a).clone()), Sequent::to(g.clone(), (**b).clone())],
            ),
            Some(Formula::Bin(BinOp::Fus, a, b)) if cal.has_rule(RuleId::FusR) => {
                let splits = split_cache.get_or_insert_with(|| {
                    if g.len() <= self.cfg.split_cap {
                        sub_multisets(g)
                    } else {
                        self.truncated = true;
                        (0..=g.len()).map(|k| (g[..k].to_vec(), g[k..].to_vec())).collect()
                    }
                });
                for (s, r) in splits.iter() {
                    push(
                        RuleId::FusR,
                        Sequent::to(cat(s, r), Formula::fus((**a).clone(), (**b).clone())),
                        vec![Sequent::to(s.clone(), (**a).clone()), Sequent::to(r.clone(), (**b).clone())],
                    );
                }
            }
            Some(Formula::Bin(BinOp::Rimp, a, b)) => {
                push(RuleId::RimpR, goal.clone(), vec![Sequent::to(cat(&[(**a).clone()], g), (**b).clone())]);
            }
            Some(Formula::Bin(BinOp::Limp, a, b)) => {
                push(RuleId::LimpR, goal.clone(), vec![Sequent::to(cat(g, &[(**a).clone()]), (**b).clone())]);
            }
            Some(Formula::Un(UnOp::Rneg, a)) => {
                push(RuleId::RnegR, goal.clone(), vec![Sequent::to_empty(cat(&[(**a).clone()], g))]);
            }
            Some(Formula::Un(UnOp::Lneg, a)) => {
                push(RuleId::LnegR, goal.clone(), vec![Sequent::to_empty(cat(g, &[(**a).clone()]))]);
            }
            Some(Formula::Zero) => push(RuleId::ZeroR, goal.clone(), vec![Sequent::to_empty(g.clone())]),
            _ => {}
        }
        if d.is_some() {
            push(RuleId::WeakR, goal.clone(), vec![Sequent::to_empty(g.clone())]);
        }
        out
    }

    fn cut_expansions(&mut self, goal: &Sequent, out: &mut Vec<Expansion>) {
        let g = &goal.ante;
        let formulas = self.cut_formulas.clone();
        if self.multiset {
            let splits = self.splits(g);
            for phi in &formulas {
                for (s, r) in &splits {
                    let concl = Sequent::new(s.iter().chain(r).cloned().collect(), goal.succ.clone());
                    let p1 = Sequent::new(std::iter::once(phi.clone()).chain(r.iter().cloned()).collect(), goal.succ.clone());
                    out.push(Expansion { rule: RuleId::Cut, concl, premises: vec![Sequent::to(s.clone(), phi.clone()), p1] });
                }
            }
        } else {
            for phi in &formulas {
                for i in 0..=g.len() {
                    for j in i..=g.len() {
                        let p1: Vec<Formula> =
                            g[..i].iter().cloned().chain(std::iter::once(phi.clone())).chain(g[j..].iter().cloned()).collect();
                        out.push(Expansion {
                            rule: RuleId::Cut,
                            concl: goal.clone(),
                            premises: vec![Sequent::to(g[i..j].to_vec(), phi.clone()), Sequent::new(p1, goal.succ.clone())],
                        });
                    }
                }
            }
        }
    }

    fn search(&mut self, goal: &Sequent, remaining: usize, ancestors: &mut Vec<Sequent>) -> Result<ProofTree, Fail> {
        if let Some(t) = self.proved.get(goal) {
            return Ok(t.clone());
        }
        if let Some(h) = self.hyps.get(goal) {
            let t = self.rearrange(ProofTree::hyp(h.clone()), goal);
            return Ok(t);
        }
        let key = if self.loop_check { Some(self.loop_key(goal)) } else { None };
        if let Some(k) = &key {
            if ancestors.contains(k) {
                return Err(Fail::Loop);
            }
        }
        if let Some(&d) = self.failed.get(goal) {
            if d >= remaining {
                return Err(if d == usize::MAX { Fail::Closed } else { Fail::Bounded });
            }
        }
        if remaining == 0 {
            return Err(Fail::Bounded);
        }
        let mut exps = self.expansions(goal);
        if self.commit {
            if let Some(pos) = exps.iter().position(|e| rank(e.rule) == 0) {
                exps.truncate(pos + 1);
                exps.drain(..pos);
            } else if let Some(pos) = exps.iter().position(|e| invertible(e.rule)) {
                exps.truncate(pos + 1);
                exps.drain(..pos);
            }
        }
        if let Some(k) = key.clone() {
            ancestors.push(k);
        }
        let mut worst = Fail::Closed;
        let mut found = None;
        'exp: for exp in exps {
            let mut subtrees = Vec::with_capacity(exp.premises.len());
            for p in &exp.premises {
                let np = self.normalize(p);
                match self.search(&np, remaining.saturating_sub(1), ancestors) {
                    Ok(t) => subtrees.push(self.rearrange(t, p)),
                    Err(f) => {
                        worst = worst.max(f);
                        continue 'exp;
                    }
                }
            }
            let node = ProofTree::node(exp.rule, exp.concl, subtrees);
            found = Some(self.rearrange(node, goal));
            break;
        }
        if key.is_some() {
            ancestors.pop();
        }
        match found {
            Some(t) => {
                self.proved.insert(goal.clone(), t.clone());
                Ok(t)
            }
            None => {
                match worst {
                    Fail::Closed => {
                        self.failed.insert(goal.clone(), usize::MAX);
                    }
                    Fail::Bounded => {
                        let e = self.failed.entry(goal.clone()).or_insert(0);
                        *e = (*e).max(remaining);
                    }
                    Fail::Loop => {}
                }
                Err(worst)
            }
        }
    }
}

/// Cut-free backward search with the default configuration.
pub fn prove(goal: &Sequent, cal: &CalculusId) -> Verdict {
    prove_with_config(goal, cal, SearchConfig::default())
}

/// Cut-free backward search.
///
/// Without contraction this is a decision procedure. With contraction it
/// deepens iteratively up to `cfg.bound`. If the search space closes under
/// the loop check, it answers `Refuted { caveat: true }` when left weakening
/// is present and `Unknown` otherwise.
pub fn prove_with_config(goal: &Sequent, cal: &CalculusId, cfg: SearchConfig) -> Verdict {
    let mut s = Searcher::new(cal, cfg);
    let start = s.normalize(goal);
    let finish = |s: &Searcher, t: ProofTree| Verdict::Proved(s.rearrange(t, goal));
    if !cal.sigma.c {
        return match s.search(&start, usize::MAX, &mut Vec::new()) {
            Ok(t) => finish(&s, t),
            Err(_) if s.truncated => Verdict::Unknown { bound: cfg.bound },
            Err(_) => Verdict::Refuted { caveat: false },
        };
    }
    let contraction_only = cal.sigma == Sigma { c: true, ..Sigma::empty() };
    for depth in 1..=cfg.bound {
        match s.search(&start, depth, &mut Vec::new()) {
            Ok(t) => return finish(&s, t),
            Err(Fail::Bounded) => continue,
            Err(_) if s.truncated || contraction_only => return Verdict::Unknown { bound: cfg.bound },
            Err(Fail::Closed) => return Verdict::Refuted { caveat: false },
            Err(Fail::Loop) if cal.sigma.wl => return Verdict::Refuted { caveat: true },
            Err(Fail::Loop) => return Verdict::Unknown { bound: cfg.bound },
        }
    }
    Verdict::Unknown { bound: cfg.bound }
}

/// Bounded search admitting hypotheses and cuts on subformulas of the goal and
/// hypotheses. Returns [`Verdict::Proved`] or [`Verdict::Unknown`], never
/// [`Verdict::Refuted`].
pub fn prove_with_hyps(goal: &Sequent, hyps: &BTreeSet<Sequent>, cal: &CalculusId, bound: usize) -> Verdict {
    let cfg = SearchConfig { bound, ..SearchConfig::default() };
    let mut s = Searcher::new(cal, cfg);
    s.commit = false;
    s.loop_check = false;
    for h in hyps {
        s.hyps.insert(s.normalize(h), h.clone());
    }
    let mut cuts = BTreeSet::new();
    for seq in hyps.iter().chain(std::iter::once(goal)) {
        for f in seq.formulas() {
            cuts.extend(subformulas(f));
        }
    }
    cuts.retain(|f| f.is_in(cal.lang));
    s.cut_formulas = cuts.into_iter().collect();
    s.max_ante = hyps.iter().chain(std::iter::once(goal)).map(|h| h.ante.len()).max().unwrap_or(0) + 2;
    let start = s.normalize(goal);
    for depth in 1..=bound.max(1) {
        if let Ok(t) = s.search(&start, depth, &mut Vec::new()) {
            return Verdict::Proved(s.rearrange(t, goal));
        }
    }
    Verdict::Unknown { bound }
}

/// Result of [`external_entails`].
#[derive(Clone, Debug)]
pub enum ExternalVerdict {
    /// A proof of `∅ ⇒ φ` from the hypotheses `∅ ⇒ ψ`.
    Proved(ProofTree),
    /// A finite model of the translated premises that fails the conclusion.
    Refuted(crate::bridge::Countermodel),
    /// Neither search succeeded within its bounds.
    Unknown {
        /// Depth bound of the proof search.
        bound: usize,
        /// Largest model size tried.
        max_size: usize,
    },
}

impl ExternalVerdict {
    /// `proved`, `refuted` or `unknown`.
    pub fn label(&self) -> &'static str {
        match self {
            ExternalVerdict::Proved(_) => "proved",
            ExternalVerdict::Refuted(_) => "refuted",
            ExternalVerdict::Unknown { .. } => "unknown",
        }
    }
}

/// Formula-level consequence of the calculus: `Σ ⊢ φ` iff
/// `{∅ ⇒ ψ : ψ ∈ Σ} ⊢ ∅ ⇒ φ`.
///
/// Refutations come only from countermodels of size at most `max_size` in the
/// variety matching `cal`.
pub fn external_entails(
    premises: &BTreeSet<Formula>,
    conclusion: &Formula,
    cal: &CalculusId,
    bound: usize,
    max_size: usize,
) -> ExternalVerdict {
    let hyps: BTreeSet<Sequent> = premises.iter().map(crate::sequents::rho_prime).collect();
    let goal = crate::sequents::rho_prime(conclusion);
    if let Verdict::Proved(t) = prove_with_hyps(&goal, &hyps, cal, bound) {
        return ExternalVerdict::Proved(t);
    }
    let variety = crate::algebra::VarietyId::for_calculus(cal);
    match crate::bridge::entails_semantically(&hyps, &goal, &variety, max_size) {
        Ok(crate::bridge::SemanticVerdict::Refuted(w)) => ExternalVerdict::Refuted(w),
        _ => ExternalVerdict::Unknown { bound, max_size },
    }
}
