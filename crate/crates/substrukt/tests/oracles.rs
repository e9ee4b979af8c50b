//! Independent brute-force oracles for derived values.

use std::collections::{BTreeMap, BTreeSet};

use substrukt::algebra::{
    check_property_equivalences, derive_residuals, enumerate_algebras, eval_term, fixtures, Family, FiniteAlgebra,
    PoMonoid, VarietyId,
};
use substrukt::bridge::{
    all_filters, calculus_for, canonical_filter, countermodel, entails_semantically, filter_congruence_correspondence,
    leibniz_congruence, CountermodelResult, FilterSlices, LeibnizResult, SemanticVerdict,
};
use substrukt::calculus::{check_proof, CalculusId, Sigma};
use substrukt::completion::{all_ideals, ideal_completion};
use substrukt::search::{prove, prove_with_hyps, Verdict, DEFAULT_BOUND};
use substrukt::sequents::{parse_sequent, tau, Sequent};
use substrukt::syntax::Language;

type Table = Vec<Vec<usize>>;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every binary table on `n` elements, filtered by `keep`.
fn tables(n: usize, keep: impl Fn(&Table) -> bool) -> Vec<Table> {
    let cells = n * n;
    let total = n.pow(cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut t = vec![vec![0; n]; n];
        for i in 0..cells {
            t[i / n][i % n] = c % n;
            c /= n;
        }
        if keep(&t) {
            out.push(t);
        }
    }
    out
}

fn associative(t: &Table) -> bool {
    let n = t.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a][b]][c] == t[a][t[b][c]])))
}

fn is_semilattice(t: &Table) -> bool {
    let n = t.len();
    (0..n).all(|a| t[a][a] == a && (0..n).all(|b| t[a][b] == t[b][a])) && associative(t)
}

/// Structural conditions written directly as table checks:
/// e: x*y = y*x; wl: x ∨ 1 = 1; wr: 0 ∨ x = x; c: x ∨ x*x = x*x.
fn sigma_holds(join: &Table, fus: &Table, zero: usize, one: usize, s: Sigma) -> bool {
    let n = join.len();
    (!s.e || (0..n).all(|x| (0..n).all(|y| fus[x][y] == fus[y][x])))
        && (!s.wl || (0..n).all(|x| join[x][one] == one))
        && (!s.wr || (0..n).all(|x| join[zero][x] == x))
        && (!s.c || (0..n).all(|x| join[x][fus[x][x]] == fus[x][x]))
}

type Structure = (Table, Table, usize, usize);

/// Every pointed sl-monoid on `0..n`, without any pruning: all semilattices
/// × all unital associative distributive tables × all zeros.
fn brute_force_msl(n: usize) -> Vec<Structure> {
    let mut out = Vec::new();
    for join in tables(n, is_semilattice) {
        for one in 0..n {
            let fuses = tables(n, |t| {
                (0..n).all(|x| t[one][x] == x && t[x][one] == x)
                    && associative(t)
                    && (0..n).all(|x| {
                        (0..n).all(|y| {
                            (0..n).all(|z| {
                                t[x][join[y][z]] == join[t[x][y]][t[x][z]] && t[join[y][z]][x] == join[t[y][x]][t[z][x]]
                            })
                        })
                    })
            });
            for fus in fuses {
                for zero in 0..n {
                    out.push((join.clone(), fus.clone(), zero, one));
                }
            }
        }
    }
    out
}

/// Number of isomorphism classes among the structures satisfying `s`,
/// deduplicated by the lexicographically least relabelling.
fn count_up_to_iso(all: &[Structure], n: usize, s: Sigma) -> usize {
    let perms = permutations(n);
    let mut seen: BTreeSet<Structure> = BTreeSet::new();
    for (join, fus, zero, one) in all {
        if !sigma_holds(join, fus, *zero, *one, s) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut j = vec![vec![0; n]; n];
                let mut f = vec![vec![0; n]; n];
                for a in 0..n {
                    for b in 0..n {
                        j[p[a]][p[b]] = p[join[a][b]];
                        f[p[a]][p[b]] = p[fus[a][b]];
                    }
                }
                (j, f, p[*zero], p[*one])
            })
            .min()
            .unwrap();
        seen.insert(canon);
    }
    seen.len()
}

#[test]
fn msl_enumeration_matches_brute_force_for_every_sigma() {
    for n in 1..=3 {
        let all = brute_force_msl(n);
        for s in Sigma::all() {
            let expected = count_up_to_iso(&all, n, s);
            let got = enumerate_algebras(&VarietyId::new(Family::Msl, s), n).unwrap().len();
            assert_eq!(got, expected, "Msl size {n} sigma {{{s}}}");
        }
    }
}

#[test]
fn trivial_algebra_is_unique() {
    assert_eq!(enumerate_algebras(&VarietyId::new(Family::Msl, Sigma::empty()), 1).unwrap().len(), 1);
}

#[test]
fn two_element_integral_contractive_commutative_fl_algebra_is_boolean() {
    let all = enumerate_algebras(&VarietyId::new(Family::FL, Sigma::all_rules()), 2).unwrap();
    assert_eq!(all.len(), 1);
    let a = &all[0];
    // bottom = zero, top = one, fusion is meet.
    let (bot, top) = (a.bottom().unwrap(), a.top());
    assert_eq!(a.zero(), bot);
    assert_eq!(a.one(), top);
    for x in 0..2 {
        for y in 0..2 {
            assert_eq!(a.fus(x, y), a.meet(x, y).unwrap());
        }
    }
}

#[test]
fn residuals_of_four_chain_are_the_heyting_arrow() {
    let a = derive_residuals(&fixtures::four_chain()).unwrap();
    let top = a.top();
    for x in 0..4 {
        for y in 0..4 {
            let expected = if a.leq(x, y) { top } else { y };
            assert_eq!(a.rimp(x, y), Some(expected));
            assert_eq!(a.limp(x, y), Some(expected));
        }
    }
}

#[test]
fn diamond_has_no_right_residual_into_zero() {
    let d = fixtures::diamond();
    let a = d.index_of("a").unwrap();
    let zero = d.zero();
    // R = {x : a*x <= 0}, computed directly; it has no maximum.
    let r: Vec<usize> = (0..4).filter(|&x| d.leq(d.fus(a, x), zero)).collect();
    assert_eq!(r.len(), 3);
    let has_max = r.iter().any(|&m| r.iter().all(|&x| d.leq(x, m)));
    assert!(!has_max);
    assert!(derive_residuals(&d).is_err());
}

#[test]
fn three_chain_nilpotent_fails_contraction_at_a() {
    let a = fixtures::three_chain_nilpotent();
    let x = a.index_of("a").unwrap();
    assert!(!a.leq(x, a.fus(x, x)));
    for y in [a.zero(), a.one()] {
        assert!(a.leq(y, a.fus(y, y)));
    }
}

/// Nonempty down-closed join-closed subsets, by exhaustion.
fn brute_force_ideals(a: &FiniteAlgebra) -> usize {
    let n = a.size();
    (1u64..(1 << n))
        .filter(|&s| {
            let m = |x: usize| s & (1 << x) != 0;
            (0..n).all(|x| !m(x) || (0..n).all(|y| !a.leq(y, x) || m(y)))
                && (0..n).all(|x| (0..n).all(|y| !(m(x) && m(y)) || m(a.join(x, y))))
        })
        .count()
}

#[test]
fn ideal_counts_match_brute_force() {
    for a in [fixtures::four_chain(), fixtures::diamond(), fixtures::two_chain(), fixtures::three_chain_nilpotent()] {
        assert_eq!(all_ideals(&a).len(), brute_force_ideals(&a));
    }
    assert_eq!(brute_force_ideals(&fixtures::four_chain()), 4);
}

#[test]
fn completion_of_two_chain_has_two_elements() {
    let c = ideal_completion(&fixtures::two_chain()).unwrap();
    assert_eq!(c.algebra.size(), 2);
}

#[test]
fn completion_of_four_chain_is_its_heyting_expansion() {
    let a = fixtures::four_chain();
    let c = ideal_completion(&a).unwrap();
    let h = derive_residuals(&a).unwrap();
    let emb = c.embedding.clone().unwrap();
    for x in 0..4 {
        for y in 0..4 {
            assert_eq!(c.algebra.join(emb[x], emb[y]), emb[a.join(x, y)]);
            assert_eq!(c.algebra.fus(emb[x], emb[y]), emb[a.fus(x, y)]);
            assert_eq!(c.algebra.rimp(emb[x], emb[y]), Some(emb[h.rimp(x, y).unwrap()]));
        }
    }
}

#[test]
fn countermodel_for_square_is_the_nilpotent_chain() {
    let s = parse_sequent("p => p * p", &Language::core()).unwrap();
    let v = VarietyId::new(Family::Msl, Sigma::empty());
    let CountermodelResult::Found(w) = countermodel(&s, &v, 3).unwrap() else { panic!("expected a countermodel") };
    let a = &w.algebra;
    let p = w.assignment["p"];
    // Verified by direct evaluation, not by the library's search.
    assert!(!a.leq(p, a.fus(p, p)));
    assert!(a.size() <= 3);
    // Some 3-element chain with a nilpotent middle element exists among the models.
    let chains = enumerate_algebras(&v, 3).unwrap();
    assert!(chains.iter().any(|m| {
        let n = 3;
        let total = (0..n).all(|x| (0..n).all(|y| m.leq(x, y) || m.leq(y, x)));
        total && (0..n).any(|x| x != m.bottom().unwrap_or(usize::MAX) && m.fus(x, x) == m.bottom().unwrap_or(usize::MAX))
    }));
}

#[test]
fn sequent_with_empty_sides_is_refuted_by_two_chain() {
    let goal = parse_sequent("=> 0", &Language::full()).unwrap();
    let v = VarietyId::new(Family::FL, Sigma::empty());
    let SemanticVerdict::Refuted(w) = entails_semantically(&BTreeSet::new(), &goal, &v, 2).unwrap() else {
        panic!("expected a countermodel")
    };
    assert_eq!(w.algebra.size(), 2);
    assert!(!w.algebra.leq(w.algebra.one(), w.algebra.zero()));
}

#[test]
fn hypothesis_one_below_p_does_not_give_square_without_structure() {
    // From 1 <= p, monotonicity gives 1 = 1*1 <= p*p, so the entailment holds
    // even without structural rules: no countermodel may exist.
    let hyps = BTreeSet::from([parse_sequent("=> p", &Language::core()).unwrap()]);
    let goal = parse_sequent("=> p * p", &Language::core()).unwrap();
    let v = VarietyId::new(Family::Msl, Sigma::empty());
    assert!(matches!(entails_semantically(&hyps, &goal, &v, 3).unwrap(), SemanticVerdict::NoCountermodelUpTo { .. }));
    let cal = CalculusId::new(Sigma::empty(), Language::core());
    assert!(prove_with_hyps(&goal, &hyps, &cal, DEFAULT_BOUND).is_proved());
}

#[test]
fn fusion_from_two_hypotheses() {
    let lang = Language::full();
    let hyps: BTreeSet<Sequent> = ["=> p", "=> q"].iter().map(|s| parse_sequent(s, &lang).unwrap()).collect();
    let goal = parse_sequent("=> p * q", &lang).unwrap();
    let cal = CalculusId::new(Sigma::empty(), lang);
    let Verdict::Proved(t) = prove_with_hyps(&goal, &hyps, &cal, DEFAULT_BOUND) else { panic!("expected a proof") };
    check_proof(&t, &cal, &hyps).unwrap();
}

#[test]
fn fixture_sequents() {
    let lang = Language::full();
    let fl = CalculusId::new(Sigma::empty(), lang);
    let fle = CalculusId::new(Sigma::parse("e").unwrap(), lang);
    let sq = |s: &str| parse_sequent(s, &lang).unwrap();
    assert!(prove(&sq("p => p * p"), &fl).is_refuted());
    assert!(prove(&sq("p * q => q * p"), &fl).is_refuted());
    assert!(prove(&sq("p * q => q * p"), &fle).is_proved());
}

/// All partitions of `0..n`, as label vectors in restricted-growth form.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        let max = cur.iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..=max {
            cur.push(l);
            go(i + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// Whether a partition is compatible with every operation of `a`, checked
/// from the raw tables.
fn is_congruence(a: &FiniteAlgebra, l: &[usize]) -> bool {
    let n = a.size();
    let bin: Vec<Box<dyn Fn(usize, usize) -> Option<usize> + '_>> = vec![
        Box::new(|x, y| Some(a.join(x, y))),
        Box::new(|x, y| Some(a.fus(x, y))),
        Box::new(|x, y| a.meet(x, y)),
        Box::new(|x, y| a.rimp(x, y)),
        Box::new(|x, y| a.limp(x, y)),
    ];
    let un: Vec<Box<dyn Fn(usize) -> Option<usize> + '_>> = vec![Box::new(|x| a.rneg(x)), Box::new(|x| a.lneg(x))];
    for x in 0..n {
        for x2 in 0..n {
            if l[x] != l[x2] {
                continue;
            }
            for f in &un {
                if let (Some(u), Some(v)) = (f(x), f(x2)) {
                    if l[u] != l[v] {
                        return false;
                    }
                }
            }
            for y in 0..n {
                for y2 in 0..n {
                    if l[y] != l[y2] {
                        continue;
                    }
                    for f in &bin {
                        if let (Some(u), Some(v)) = (f(x, y), f(x2, y2)) {
                            if l[u] != l[v] {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

fn compatible(l: &[usize], r: &FilterSlices) -> bool {
    let n = l.len();
    (0..n).all(|x| {
        (0..n).all(|x2| {
            l[x] != l[x2]
                || (r.s0[x] == r.s0[x2] && (0..n).all(|y| r.s1[x][y] == r.s1[x2][y] && r.s1[y][x] == r.s1[y][x2]))
        })
    })
}

fn pairs(l: &[usize]) -> usize {
    let n = l.len();
    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| l[x] == l[y]).count()
}

#[test]
fn leibniz_congruence_is_the_largest_compatible_one() {
    for fam in [Family::Msl, Family::FL] {
        for n in 1..=3 {
            let v = VarietyId::new(fam, Sigma::empty());
            for a in enumerate_algebras(&v, n).unwrap() {
                let cal = calculus_for(&v);
                for r in all_filters(&a, &cal, 4) {
                    let best = partitions(n)
                        .into_iter()
                        .filter(|l| is_congruence(&a, l) && compatible(l, &r))
                        .max_by_key(|l| pairs(l))
                        .unwrap();
                    let LeibnizResult::Congruence(c) = leibniz_congruence(&a, &r) else {
                        panic!("filter {r:?} of\n{a}has no Leibniz congruence")
                    };
                    for x in 0..n {
                        for y in 0..n {
                            assert_eq!(c.related(x, y), best[x] == best[y]);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn canonical_filter_gives_identity() {
    for a in [fixtures::four_chain(), fixtures::two_chain(), fixtures::three_chain_nilpotent()] {
        let LeibnizResult::Congruence(c) = leibniz_congruence(&a, &canonical_filter(&a)) else { panic!() };
        assert_eq!(c.classes(), a.size());
    }
}

#[test]
fn four_chain_msl_filter_count_matches_congruence_oracle() {
    let a = fixtures::four_chain().reduct(Language::core());
    let v = VarietyId::new(Family::Msl, Sigma::empty());
    // Msl is a variety, so every congruence is relative to it.
    let expected = partitions(4).into_iter().filter(|l| is_congruence(&a, l)).count();
    assert_eq!(expected, 8, "a 4-chain has 2^3 interval partitions");
    let report = filter_congruence_correspondence(&a, &v).unwrap();
    assert!(report.holds(), "{:?}", report.failures);
    assert_eq!(report.filters, expected);
    assert_eq!(report.congruences, expected);
}

#[test]
fn boolean_two_chain_has_two_filters() {
    let all = enumerate_algebras(&VarietyId::new(Family::FL, Sigma::all_rules()), 2).unwrap();
    let report = filter_congruence_correspondence(&all[0], &VarietyId::new(Family::FL, Sigma::all_rules())).unwrap();
    assert!(report.holds());
    assert_eq!((report.filters, report.congruences), (2, 2));
}

/// Every partial order on `n` labelled elements, as `leq[x][y]`.
fn partial_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let off: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|(x, y)| x != y).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << off.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(x, y)) in off.iter().enumerate() {
            if mask & (1 << k) != 0 {
                leq[x][y] = true;
            }
        }
        let antisym = (0..n).all(|x| (0..n).all(|y| x == y || !(leq[x][y] && leq[y][x])));
        let trans = (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| !(leq[x][y] && leq[y][z]) || leq[x][z])));
        if antisym && trans {
            out.push(leq);
        }
    }
    out
}

#[test]
fn property_equivalences_hold_on_every_small_po_monoid() {
    let mut checked = 0;
    for n in 1..=3 {
        let orders = partial_orders(n);
        for leq in &orders {
            for one in 0..n {
                let fuses = tables(n, |t| {
                    (0..n).all(|x| t[one][x] == x && t[x][one] == x)
                        && associative(t)
                        && (0..n).all(|x| {
                            (0..n).all(|y| {
                                !leq[x][y] || (0..n).all(|z| leq[t[x][z]][t[y][z]] && leq[t[z][x]][t[z][y]])
                            })
                        })
                });
                for fus in fuses {
                    for zero in 0..n {
                        let m = PoMonoid::new(leq.clone(), fus.clone(), zero, one).unwrap();
                        let r = check_property_equivalences(&m);
                        assert!(r.consistent(), "{r:?}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn tau_of_countermodel_sequent_is_violated() {
    // The equation of a refuted sequent really fails in the reported model.
    let lang = Language::core();
    for text in ["p => p * p", "p * q => q * p", "p => q"] {
        let s = parse_sequent(text, &lang).unwrap();
        let v = VarietyId::new(Family::Msl, Sigma::empty());
        if let CountermodelResult::Found(w) = countermodel(&s, &v, 3).unwrap() {
            let e = tau(&s).into_iter().next().unwrap();
            let asg: BTreeMap<String, usize> = w.assignment.clone();
            assert_ne!(eval_term(&w.algebra, &e.lhs, &asg).unwrap(), eval_term(&w.algebra, &e.rhs, &asg).unwrap());
        } else {
            panic!("{text} should have a countermodel");
        }
    }
}
