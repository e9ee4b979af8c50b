//! Random formulas, sequents, and derivable sequents built by forward rule
//! application, for property tests and benchmark corpora.
//!
//! ```
//! use substrukt::calculus::{check_proof, CalculusId, Sigma};
//! use substrukt::gen::{random_derivation, rng_from_seed};
//! use substrukt::syntax::Language;
//!
//! let cal = CalculusId::new(Sigma::empty(), Language::full());
//! let mut rng = rng_from_seed(1);
//! let proof = random_derivation(&mut rng, &cal, 4);
//! assert!(check_proof(&proof, &cal, &Default::default()).is_ok());
//! ```

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{CalculusId, ProofTree, RuleId};
use crate::sequents::Sequent;
use crate::syntax::{Connective, Formula, Language};

/// The generator used throughout: a seeded ChaCha stream.
pub type GenRng = ChaCha8Rng;

/// Environment variable that fixes the seed of [`rng_from_env`].
pub const SEED_VAR: &str = "SUBSTRUKT_SEED";

/// A generator with a fixed seed.
pub fn rng_from_seed(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A generator seeded from `SUBSTRUKT_SEED`, or from `default` when the
/// variable is unset or not a number.
pub fn rng_from_env(default: u64) -> GenRng {
    let seed = std::env::var(SEED_VAR).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default);
    rng_from_seed(seed)
}

/// Variable names `p`, `q`, `r`, `s`, … (at most 8).
pub fn var_names(n: usize) -> Vec<String> {
    ["p", "q", "r", "s", "t", "u", "v", "w"].iter().take(n.clamp(1, 8)).map(|s| s.to_string()).collect()
}

/// A random formula of `lang` over `vars` with depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, lang: Language, vars: &[String], depth: usize) -> Formula {
    let leaf = |rng: &mut R| -> Formula {
        match rng.gen_range(0..10) {
            0 => Formula::Zero,
            1 => Formula::One,
            _ => Formula::var(vars.choose(rng).expect("at least one variable").clone()),
        }
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let conns: Vec<Connective> = lang.connectives().into_iter().filter(|c| !matches!(c, Connective::Zero | Connective::One)).collect();
    let c = *conns.choose(rng).expect("core connectives");
    let sub = |rng: &mut R| random_formula(rng, lang, vars, depth - 1);
    match c {
        Connective::Join => Formula::join(sub(rng), sub(rng)),
        Connective::Meet => Formula::meet(sub(rng), sub(rng)),
        Connective::Fus => Formula::fus(sub(rng), sub(rng)),
        Connective::Rimp => Formula::rimp(sub(rng), sub(rng)),
        Connective::Limp => Formula::limp(sub(rng), sub(rng)),
        Connective::Rneg => Formula::rneg(sub(rng)),
        Connective::Lneg => Formula::lneg(sub(rng)),
        Connective::Zero | Connective::One => unreachable!("filtered"),
    }
}

/// A random sequent: up to `max_ante` antecedent formulas and, with
/// probability 0.8, a succedent.
pub fn random_sequent<R: Rng>(rng: &mut R, lang: Language, vars: &[String], max_ante: usize, depth: usize) -> Sequent {
    let n = rng.gen_range(0..=max_ante);
    let ante = (0..n).map(|_| random_formula(rng, lang, vars, depth)).collect();
    let succ = if rng.gen_bool(0.8) { Some(random_formula(rng, lang, vars, depth)) } else { None };
    Sequent::new(ante, succ)
}

fn leaf<R: Rng>(rng: &mut R, cal: &CalculusId, vars: &[String]) -> ProofTree {
    match rng.gen_range(0..10) {
        0 => ProofTree::leaf(RuleId::OneR, Sequent::to(vec![], Formula::One)),
        1 => ProofTree::leaf(RuleId::ZeroL, Sequent::to_empty(vec![Formula::Zero])),
        _ => {
            let f = random_formula(rng, cal.lang, vars, 1);
            ProofTree::leaf(RuleId::Axiom, Sequent::to(vec![f.clone()], f))
        }
    }
}

fn insert_at<T: Clone>(v: &[T], i: usize, items: &[T]) -> Vec<T> {
    v[..i].iter().chain(items).chain(&v[i..]).cloned().collect()
}

fn replace_at<T: Clone>(v: &[T], i: usize, items: &[T]) -> Vec<T> {
    v[..i].iter().chain(items).chain(&v[i + 1..]).cloned().collect()
}

/// Tries to apply `rule` forward to `premises`; `None` when the shapes do not fit.
fn apply<R: Rng>(rng: &mut R, cal: &CalculusId, vars: &[String], rule: RuleId, ps: Vec<ProofTree>) -> Option<ProofTree> {
    let g = ps[0].conclusion.ante.clone();
    let d = ps[0].conclusion.succ.clone();
    let n = g.len();
    let extra = |rng: &mut R| random_formula(rng, cal.lang, vars, 1);
    let concl = match rule {
        RuleId::OrR1 | RuleId::OrR2 => {
            let a = d?;
            let b = extra(rng);
            Sequent::to(g, if rule == RuleId::OrR1 { Formula::join(a, b) } else { Formula::join(b, a) })
        }
        RuleId::AndL1 | RuleId::AndL2 => {
            if n == 0 {
                return None;
            }
            let i = rng.gen_range(0..n);
            let b = extra(rng);
            let m = if rule == RuleId::AndL1 { Formula::meet(g[i].clone(), b) } else { Formula::meet(b, g[i].clone()) };
            Sequent::new(replace_at(&g, i, &[m]), d)
        }
        RuleId::FusL => {
            if n < 2 {
                return None;
            }
            let i = rng.gen_range(0..n - 1);
            let f = Formula::fus(g[i].clone(), g[i + 1].clone());
            Sequent::new(g[..i].iter().cloned().chain([f]).chain(g[i + 2..].iter().cloned()).collect(), d)
        }
        RuleId::RimpR => {
            let (a, rest) = g.split_first()?;
            Sequent::to(rest.to_vec(), Formula::rimp(a.clone(), d?))
        }
        RuleId::LimpR => {
            let (a, rest) = g.split_last()?;
            Sequent::to(rest.to_vec(), Formula::limp(a.clone(), d?))
        }
        RuleId::RnegR => {
            if d.is_some() {
                return None;
            }
            let (a, rest) = g.split_first()?;
            Sequent::to(rest.to_vec(), Formula::rneg(a.clone()))
        }
        RuleId::LnegR => {
            if d.is_some() {
                return None;
            }
            let (a, rest) = g.split_last()?;
            Sequent::to(rest.to_vec(), Formula::lneg(a.clone()))
        }
        RuleId::RnegL => Sequent::to_empty(insert_at(&g, n, &[Formula::rneg(d?)])),
        RuleId::LnegL => Sequent::to_empty(insert_at(&g, 0, &[Formula::lneg(d?)])),
        RuleId::OneL => Sequent::new(insert_at(&g, rng.gen_range(0..=n), &[Formula::One]), d),
        RuleId::ZeroR => {
            if d.is_some() {
                return None;
            }
            Sequent::to(g, Formula::Zero)
        }
        RuleId::WeakL => {
            let f = extra(rng);
            Sequent::new(insert_at(&g, rng.gen_range(0..=n), &[f]), d)
        }
        RuleId::WeakR => {
            if d.is_some() {
                return None;
            }
            Sequent::to(g, extra(rng))
        }
        RuleId::ExchL => {
            if n < 2 {
                return None;
            }
            let i = rng.gen_range(0..n - 1);
            let mut v = g;
            v.swap(i, i + 1);
            Sequent::new(v, d)
        }
        RuleId::ContrL => {
            let i = (0..n.saturating_sub(1)).find(|&i| g[i] == g[i + 1])?;
            Sequent::new(replace_at(&g, i, &[]), d)
        }
        RuleId::OrL | RuleId::AndR => {
            // Both premises share their context; use a copy of the first.
            let dup = ps[0].clone();
            let ps = vec![ps[0].clone(), dup];
            let c = if rule == RuleId::OrL {
                if n == 0 {
                    return None;
                }
                let i = rng.gen_range(0..n);
                Sequent::new(replace_at(&g, i, &[Formula::join(g[i].clone(), g[i].clone())]), d)
            } else {
                let a = d?;
                Sequent::to(g, Formula::meet(a.clone(), a))
            };
            return Some(ProofTree::node(rule, c, ps));
        }
        RuleId::FusR => {
            let right = &ps[1].conclusion;
            Sequent::to(insert_at(&g, n, &right.ante), Formula::fus(d?, right.succ.clone()?))
        }
        RuleId::RimpL | RuleId::LimpL => {
            let phi = d?;
            let p1 = &ps[1].conclusion;
            if p1.ante.is_empty() {
                return None;
            }
            let i = rng.gen_range(0..p1.ante.len());
            let psi = p1.ante[i].clone();
            let ante = if rule == RuleId::RimpL {
                let mut mid = g.clone();
                mid.push(Formula::rimp(phi, psi));
                replace_at(&p1.ante, i, &mid)
            } else {
                let mut mid = vec![Formula::limp(phi, psi)];
                mid.extend(g.iter().cloned());
                replace_at(&p1.ante, i, &mid)
            };
            Sequent::new(ante, p1.succ.clone())
        }
        _ => return None,
    };
    Some(ProofTree::node(rule, concl, ps))
}

/// A random cut-free proof in `cal` of height at most `depth + 1`, built
/// bottom-up from axioms by applying randomly chosen rules forward.
pub fn random_derivation<R: Rng>(rng: &mut R, cal: &CalculusId, depth: usize) -> ProofTree {
    let vars = var_names(3);
    random_derivation_over(rng, cal, &vars, depth)
}

fn random_derivation_over<R: Rng>(rng: &mut R, cal: &CalculusId, vars: &[String], depth: usize) -> ProofTree {
    if depth == 0 || rng.gen_bool(0.15) {
        return leaf(rng, cal, vars);
    }
    let rules: Vec<RuleId> = cal
        .rules()
        .into_iter()
        .filter(|r| !matches!(r, RuleId::Axiom | RuleId::Cut | RuleId::OneR | RuleId::ZeroL | RuleId::Hypothesis))
        .collect();
    for _ in 0..20 {
        let rule = *rules.choose(rng).expect("rules");
        let arity = match rule {
            RuleId::FusR | RuleId::RimpL | RuleId::LimpL => 2,
            _ => 1,
        };
        let ps: Vec<ProofTree> = (0..arity).map(|_| random_derivation_over(rng, cal, vars, depth - 1)).collect();
        if let Some(t) = apply(rng, cal, vars, rule, ps) {
            return t;
        }
    }
    leaf(rng, cal, vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_proof, Sigma};

    #[test]
    fn derivations_check() {
        let mut rng = rng_from_seed(3);
        for sigma in Sigma::all() {
            for (_, lang) in Language::presets() {
                let cal = CalculusId::new(sigma, lang);
                for _ in 0..30 {
                    let t = random_derivation(&mut rng, &cal, 5);
                    check_proof(&t, &cal, &Default::default()).unwrap_or_else(|e| panic!("{cal}: {e}\n{}", t.to_sexp()));
                    assert!(t.conclusion.is_in(lang));
                }
            }
        }
    }

    #[test]
    fn formulas_stay_in_language() {
        let mut rng = rng_from_seed(9);
        let vars = var_names(3);
        for (_, lang) in Language::presets() {
            for _ in 0..50 {
                let f = random_formula(&mut rng, lang, &vars, 3);
                assert!(f.is_in(lang));
                assert!(f.depth() <= 3);
            }
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<u32> = (0..5).map(|_| rng_from_seed(42).gen()).collect();
        let b: Vec<u32> = (0..5).map(|_| rng_from_seed(42).gen()).collect();
        assert_eq!(a, b);
    }
}
