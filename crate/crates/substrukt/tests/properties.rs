//! Randomized invariants of syntax, calculi, search and algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use proptest::prelude::*;
use substrukt::algebra::{
    derive_fl, enumerate_algebras, eval_term, opposite, satisfies_equation, Family, FiniteAlgebra, VarietyId,
};
use substrukt::bridge::{countermodel, CountermodelResult};
use substrukt::calculus::{
    check_proof, is_instance, mirror_proof, rule_instances_backward, CalculusId, ProofTree, RuleId, Sigma,
};
use substrukt::completion::{adjoins_empty_set, all_ideals, ideal_completion, product_containment_violation, verify_embedding};
use substrukt::gen::{random_derivation, random_formula, random_sequent, rng_from_seed, var_names};
use substrukt::search::{prove, prove_with_config, prove_with_hyps, SearchConfig, Verdict};
use substrukt::sequents::{mirror_sequent, parse_sequent, tau, Equation};
use substrukt::syntax::{apply_subst, mirror_formula, parse_formula, Formula, Language, Substitution};

fn sigma_strategy() -> impl Strategy<Value = Sigma> {
    (0usize..16).prop_map(|i| Sigma::all()[i])
}

fn lang_strategy() -> impl Strategy<Value = Language> {
    (0usize..5).prop_map(|i| Language::presets()[i].1)
}

fn formula(seed: u64, lang: Language, depth: usize) -> Formula {
    random_formula(&mut rng_from_seed(seed), lang, &var_names(3), depth)
}

/// Algebras of size ≤ 3 with every operation, drawn from the FL varieties.
fn fl_algebras() -> &'static Vec<FiniteAlgebra> {
    static ALL: OnceLock<Vec<FiniteAlgebra>> = OnceLock::new();
    ALL.get_or_init(|| {
        let mut v = Vec::new();
        for s in Sigma::all() {
            for n in 1..=3 {
                v.extend(enumerate_algebras(&VarietyId::new(Family::FL, s), n).unwrap());
            }
        }
        v
    })
}

/// Pointed sl-monoids of size ≤ 4.
fn msl_algebras() -> &'static Vec<FiniteAlgebra> {
    static ALL: OnceLock<Vec<FiniteAlgebra>> = OnceLock::new();
    ALL.get_or_init(|| {
        (1..=4).flat_map(|n| enumerate_algebras(&VarietyId::new(Family::Msl, Sigma::empty()), n).unwrap()).collect()
    })
}

fn assignment(a: &FiniteAlgebra, seed: u64) -> BTreeMap<String, usize> {
    var_names(3).into_iter().enumerate().map(|(i, v)| (v, ((seed >> (8 * i)) as usize) % a.size())).collect()
}

fn nodes(t: &ProofTree) -> Vec<&ProofTree> {
    let mut out = vec![t];
    for p in &t.premises {
        out.extend(nodes(p));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mirror_formula_is_an_involution(seed: u64, lang in lang_strategy()) {
        let f = formula(seed, lang, 4);
        prop_assert_eq!(mirror_formula(&mirror_formula(&f)), f);
    }

    #[test]
    fn mirror_sequent_is_an_involution(seed: u64) {
        let s = random_sequent(&mut rng_from_seed(seed), Language::full(), &var_names(3), 3, 3);
        prop_assert_eq!(mirror_sequent(&mirror_sequent(&s)), s);
    }

    #[test]
    fn mirror_commutes_with_substitution(seed: u64, s1: u64, s2: u64) {
        let f = formula(seed, Language::full(), 3);
        let sub: Substitution = [("p", s1), ("q", s2)]
            .into_iter()
            .map(|(v, s)| (v.to_string(), formula(s, Language::full(), 2)))
            .collect();
        let mirrored: Substitution = sub.iter().map(|(k, v)| (k.clone(), mirror_formula(v))).collect();
        prop_assert_eq!(mirror_formula(&apply_subst(&sub, &f)), apply_subst(&mirrored, &mirror_formula(&f)));
    }

    #[test]
    fn formulas_round_trip_through_text(seed: u64, lang in lang_strategy()) {
        let f = formula(seed, lang, 5);
        prop_assert_eq!(parse_formula(&f.to_string(), &lang).unwrap(), f);
    }

    #[test]
    fn sequents_round_trip_through_text(seed: u64) {
        let s = random_sequent(&mut rng_from_seed(seed), Language::full(), &var_names(3), 4, 3);
        prop_assert_eq!(parse_sequent(&s.to_string(), &Language::full()).unwrap(), s);
    }

    #[test]
    fn tau_is_a_single_equation_on_the_succedent(seed: u64) {
        let s = random_sequent(&mut rng_from_seed(seed), Language::full(), &var_names(3), 3, 2);
        let eqs = tau(&s);
        prop_assert_eq!(eqs.len(), 1);
        let e = eqs.into_iter().next().unwrap();
        prop_assert_eq!(&e.rhs, s.succ.as_ref().unwrap_or(&Formula::Zero));
    }

    #[test]
    fn random_derivations_check(seed: u64, sigma in sigma_strategy(), lang in lang_strategy()) {
        let cal = CalculusId::new(sigma, lang);
        let t = random_derivation(&mut rng_from_seed(seed), &cal, 4);
        prop_assert!(check_proof(&t, &cal, &BTreeSet::new()).is_ok());
    }

    #[test]
    fn mirrored_derivations_check(seed: u64, sigma in sigma_strategy()) {
        let cal = CalculusId::new(sigma, Language::full());
        let t = random_derivation(&mut rng_from_seed(seed), &cal, 4);
        let m = mirror_proof(&t);
        prop_assert_eq!(&m.conclusion, &mirror_sequent(&t.conclusion));
        prop_assert!(check_proof(&m, &cal, &BTreeSet::new()).is_ok());
    }

    #[test]
    fn rule_set_is_closed_under_mirroring(seed: u64, sigma in sigma_strategy()) {
        let cal = CalculusId::new(sigma, Language::full());
        let t = random_derivation(&mut rng_from_seed(seed), &cal, 4);
        for node in nodes(&t) {
            let mc = mirror_sequent(&node.conclusion);
            let mut mp: Vec<_> = node.premises.iter().map(|p| mirror_sequent(&p.conclusion)).collect();
            if node.rule == RuleId::FusR {
                mp.reverse();
            }
            let refs: Vec<_> = mp.iter().collect();
            prop_assert!(is_instance(node.rule.mirror(), &mc, &refs), "{} at {}", node.rule, node.conclusion);
        }
    }

    #[test]
    fn backward_instances_are_instances(seed: u64, sigma in sigma_strategy()) {
        let cal = CalculusId::new(sigma, Language::full());
        let goal = random_sequent(&mut rng_from_seed(seed), Language::full(), &var_names(2), 3, 2);
        for (rule, prem) in rule_instances_backward(&goal, &cal) {
            let refs: Vec<_> = prem.iter().collect();
            prop_assert!(is_instance(rule, &goal, &refs), "{rule} on {goal}");
            prop_assert!(cal.has_rule(rule));
        }
    }

    #[test]
    fn backward_enumeration_finds_forward_steps(seed: u64, sigma in sigma_strategy()) {
        let cal = CalculusId::new(sigma, Language::full());
        let t = random_derivation(&mut rng_from_seed(seed), &cal, 4);
        for node in nodes(&t) {
            if node.premises.is_empty() {
                continue;
            }
            let prem: Vec<_> = node.premises.iter().map(|p| p.conclusion.clone()).collect();
            let found = rule_instances_backward(&node.conclusion, &cal);
            prop_assert!(
                found.iter().any(|(r, p)| *r == node.rule && *p == prem),
                "{} with premises {:?} not found for {}", node.rule, prem, node.conclusion
            );
        }
    }

    #[test]
    fn opposite_evaluates_mirror_terms(i in 0usize..10_000, seed: u64, vseed: u64) {
        let all = fl_algebras();
        let a = &all[i % all.len()];
        let t = formula(seed, Language::full(), 4);
        let v = assignment(a, vseed);
        prop_assert_eq!(eval_term(&opposite(a), &mirror_formula(&t), &v).unwrap(), eval_term(a, &t, &v).unwrap());
    }

    #[test]
    fn validity_transfers_to_the_opposite(i in 0usize..10_000, s1: u64, s2: u64) {
        let all = fl_algebras();
        let a = &all[i % all.len()];
        let e = Equation::new(formula(s1, Language::full(), 3), formula(s2, Language::full(), 3));
        prop_assert_eq!(satisfies_equation(a, &e).unwrap(), satisfies_equation(&opposite(a), &e.mirror()).unwrap());
    }

    #[test]
    fn opposite_is_an_involution(i in 0usize..10_000) {
        let all = fl_algebras();
        let a = &all[i % all.len()];
        prop_assert_eq!(&opposite(&opposite(a)), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn provability_grows_with_sigma(seed: u64, lo in sigma_strategy(), extra in sigma_strategy()) {
        let hi = lo.union(extra);
        let goal = random_sequent(&mut rng_from_seed(seed), Language::core_meet(), &var_names(2), 2, 2);
        let cfg = SearchConfig { bound: 6, ..SearchConfig::default() };
        let lower = prove_with_config(&goal, &CalculusId::new(lo, Language::core_meet()), cfg);
        if lower.is_proved() {
            let upper = prove_with_config(&goal, &CalculusId::new(hi, Language::core_meet()), cfg);
            prop_assert!(!upper.is_refuted(), "{goal}: proved under {{{lo}}} but refuted under {{{hi}}}");
        }
    }

    #[test]
    fn provable_sequents_have_no_countermodel(seed: u64, sigma in sigma_strategy()) {
        let goal = random_sequent(&mut rng_from_seed(seed), Language::core(), &var_names(2), 2, 2);
        let cal = CalculusId::new(sigma, Language::core());
        let verdict = prove_with_config(&goal, &cal, SearchConfig { bound: 6, ..SearchConfig::default() });
        if verdict.is_proved() {
            let found = countermodel(&goal, &VarietyId::for_calculus(&cal), 3).unwrap();
            prop_assert!(matches!(found, CountermodelResult::NotFound), "{goal} in {{{sigma}}}");
        }
    }

    #[test]
    fn cut_is_not_needed_without_hypotheses(seed: u64, sigma in sigma_strategy()) {
        prop_assume!(sigma != Sigma::parse("c").unwrap());
        let goal = random_sequent(&mut rng_from_seed(seed), Language::core_meet(), &var_names(2), 2, 2);
        let cal = CalculusId::new(sigma, Language::core_meet());
        if prove_with_hyps(&goal, &BTreeSet::new(), &cal, 6).is_proved() {
            prop_assert!(!prove(&goal, &cal).is_refuted(), "{goal}");
        }
    }
}

#[test]
fn residuation_law_on_derived_residuals() {
    for a in msl_algebras() {
        let Ok(b) = derive_fl(a) else { continue };
        let n = b.size();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let le = b.leq(b.fus(x, y), z);
                    assert_eq!(le, b.leq(y, b.rimp(x, z).unwrap()), "\n{b}");
                    assert_eq!(le, b.leq(x, b.limp(y, z).unwrap()), "\n{b}");
                }
            }
        }
    }
}

#[test]
fn fusion_distributes_over_finite_joins_when_residuated() {
    for a in msl_algebras() {
        let Ok(b) = derive_fl(a) else { continue };
        let n = b.size();
        let subsets: Vec<Vec<usize>> = (1u32..(1 << n))
            .filter(|s| s.count_ones() <= 3)
            .map(|s| (0..n).filter(|x| s & (1 << x) != 0).collect())
            .collect();
        for xs in &subsets {
            for ys in &subsets {
                let lhs = b.fus(b.join_all(xs.iter().copied()).unwrap(), b.join_all(ys.iter().copied()).unwrap());
                let rhs = b.join_all(xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| b.fus(x, y)));
                assert_eq!(Some(lhs), rhs);
            }
        }
    }
}

#[test]
fn completion_invariants_on_small_msl_algebras() {
    for a in msl_algebras() {
        let Ok(c) = ideal_completion(a) else { continue };
        // The empty ideal is adjoined exactly when there is no least element.
        let empty = usize::from(adjoins_empty_set(&a));
        assert_eq!(c.algebra.size(), all_ideals(a).len() + empty);
        assert!(verify_embedding(a, &c).passed(), "\n{a}");
        assert_eq!(product_containment_violation(a, 3), None);
    }
}

#[test]
fn proofs_found_by_search_check() {
    let lang = Language::full();
    for text in ["p, p \\ q => q", "p /\\ q => q /\\ p", "p => p \\/ q", "p, rn(p) =>", "p * (q \\/ r) => p * q \\/ p * r"] {
        let s = parse_sequent(text, &lang).unwrap();
        let mirrored = mirror_sequent(&s);
        for goal in [s, mirrored] {
            let cal = CalculusId::new(Sigma::empty(), lang);
            let Verdict::Proved(t) = prove(&goal, &cal) else { panic!("{goal} should be provable") };
            check_proof(&t, &cal, &BTreeSet::new()).unwrap();
        }
    }
}
