//! Pointed partially ordered monoids, whose order need not be a semilattice,
//! and the equivalence between the structural quasi-inequations and their
//! equational forms.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::{FiniteAlgebra, Table2};

/// A finite pointed po-monoid `⟨A, *, 0, 1, ≤⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoMonoid {
    leq: Vec<Vec<bool>>,
    fus: Table2,
    zero: usize,
    one: usize,
}

/// Why a po-monoid failed validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoMonoidError {
    /// Tables have the wrong shape or out-of-range entries.
    #[error("malformed tables")]
    Shape,
    /// `≤` is not reflexive, antisymmetric and transitive.
    #[error("the relation is not a partial order")]
    NotAnOrder,
    /// `*` is not associative with unit `1`.
    #[error("fusion is not a monoid operation")]
    NotAMonoid,
    /// `*` is not monotone in both arguments.
    #[error("fusion is not monotone")]
    NotMonotone,
}

impl PoMonoid {
    /// Builds and validates a po-monoid.
    pub fn new(leq: Vec<Vec<bool>>, fus: Table2, zero: usize, one: usize) -> Result<PoMonoid, PoMonoidError> {
        let n = leq.len();
        if n == 0
            || leq.iter().any(|r| r.len() != n)
            || fus.len() != n
            || fus.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n))
            || zero >= n
            || one >= n
        {
            return Err(PoMonoidError::Shape);
        }
        for a in 0..n {
            if !leq[a][a] {
                return Err(PoMonoidError::NotAnOrder);
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(PoMonoidError::NotAnOrder);
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(PoMonoidError::NotAnOrder);
                    }
                    if fus[fus[a][b]][c] != fus[a][fus[b][c]] {
                        return Err(PoMonoidError::NotAMonoid);
                    }
                }
            }
            if fus[a][one] != a || fus[one][a] != a {
                return Err(PoMonoidError::NotAMonoid);
            }
        }
        let m = PoMonoid { leq, fus, zero, one };
        if !m.monotone() {
            return Err(PoMonoidError::NotMonotone);
        }
        Ok(m)
    }

    /// The `⟨*, 0, 1, ≤⟩` part of an algebra, with the join order.
    pub fn from_algebra(a: &FiniteAlgebra) -> Result<PoMonoid, PoMonoidError> {
        let n = a.size();
        let leq = (0..n).map(|x| (0..n).map(|y| a.leq(x, y)).collect()).collect();
        PoMonoid::new(leq, a.fus_table().clone(), a.zero(), a.one())
    }

    fn monotone(&self) -> bool {
        let n = self.size();
        (0..n).all(|a| {
            (0..n).all(|b| {
                !self.leq[a][b] || (0..n).all(|c| self.le(self.f(a, c), self.f(b, c)) && self.le(self.f(c, a), self.f(c, b)))
            })
        })
    }

    /// Carrier size.
    pub fn size(&self) -> usize {
        self.leq.len()
    }

    fn f(&self, a: usize, b: usize) -> usize {
        self.fus[a][b]
    }

    fn le(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }
}

/// One structural property: its quasi-inequational and equational forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyRow {
    /// `e`, `wl`, `wr` or `c`.
    pub property: &'static str,
    /// Whether the quasi-inequation holds.
    pub quasi: bool,
    /// Whether the equation holds.
    pub equation: bool,
}

/// Result of [`check_property_equivalences`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    /// One row per property.
    pub rows: Vec<PropertyRow>,
}

impl PropertyReport {
    /// Whether every quasi-inequation agrees with its equation.
    pub fn consistent(&self) -> bool {
        self.rows.iter().all(|r| r.quasi == r.equation)
    }
}

/// Evaluates both forms of the four structural properties by brute force:
///
/// | property | quasi-inequation | equation |
/// |---|---|---|
/// | `e` | `x*y ≤ z ⊃ y*x ≤ z` | `x*y = y*x` |
/// | `wl` | `x*y ≤ z ⊃ x*t*y ≤ z` | `x ≤ 1` |
/// | `wr` | `x ≤ 0 ⊃ x ≤ y` | `0 ≤ x` |
/// | `c` | `x*x ≤ y ⊃ x ≤ y` | `x ≤ x*x` |
pub fn check_property_equivalences(m: &PoMonoid) -> PropertyReport {
    let n = m.size();
    let all = |p: &dyn Fn(usize) -> bool| (0..n).all(p);
    let e_q = all(&|x| all(&|y| all(&|z| !m.le(m.f(x, y), z) || m.le(m.f(y, x), z))));
    let e_e = all(&|x| all(&|y| m.f(x, y) == m.f(y, x)));
    let wl_q = all(&|x| all(&|y| all(&|z| !m.le(m.f(x, y), z) || all(&|t| m.le(m.f(m.f(x, t), y), z)))));
    let wl_e = all(&|x| m.le(x, m.one));
    let wr_q = all(&|x| !m.le(x, m.zero) || all(&|y| m.le(x, y)));
    let wr_e = all(&|x| m.le(m.zero, x));
    let c_q = all(&|x| all(&|y| !m.le(m.f(x, x), y) || m.le(x, y)));
    let c_e = all(&|x| m.le(x, m.f(x, x)));
    PropertyReport {
        rows: vec![
            PropertyRow { property: "e", quasi: e_q, equation: e_e },
            PropertyRow { property: "wl", quasi: wl_q, equation: wl_e },
            PropertyRow { property: "wr", quasi: wr_q, equation: wr_e },
            PropertyRow { property: "c", quasi: c_q, equation: c_e },
        ],
    }
}

fn random_order<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<bool>> {
    let density: f64 = rng.gen_range(0.0..1.0);
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        leq[i][i] = true;
        for j in i + 1..n {
            leq[i][j] = rng.gen_bool(density);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    // Relabel so the natural order is not always a linear extension.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[perm[i]][perm[j]] = leq[i][j];
        }
    }
    out
}

fn partial_ok(t: &[Vec<Option<usize>>], leq: &[Vec<bool>]) -> bool {
    let n = t.len();
    for a in 0..n {
        for b in 0..n {
            let Some(ab) = t[a][b] else { continue };
            for c in 0..n {
                if let (Some(abc), Some(bc)) = (t[ab][c], t[b][c]) {
                    if let Some(a_bc) = t[a][bc] {
                        if abc != a_bc {
                            return false;
                        }
                    }
                }
                // monotonicity in each argument
                if leq[a][c] {
                    for d in 0..n {
                        if let (Some(x), Some(y)) = (t[a][d], t[c][d]) {
                            if !leq[x][y] {
                                return false;
                            }
                        }
                        if let (Some(x), Some(y)) = (t[d][a], t[d][c]) {
                            if !leq[x][y] {
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

fn fill<R: Rng>(rng: &mut R, t: &mut Vec<Vec<Option<usize>>>, cells: &[(usize, usize)], leq: &[Vec<bool>], budget: &mut usize) -> bool {
    let Some((&(a, b), rest)) = cells.split_first() else { return true };
    let n = t.len();
    let mut vals: Vec<usize> = (0..n).collect();
    vals.shuffle(rng);
    for v in vals {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        t[a][b] = Some(v);
        if partial_ok(t, leq) && fill(rng, t, rest, leq, budget) {
            return true;
        }
    }
    t[a][b] = None;
    false
}

/// A random pointed po-monoid of size `n`: a random partial order, a random
/// unit, then a random monotone associative table found by backtracking.
pub fn random_po_monoid<R: Rng>(rng: &mut R, n: usize) -> PoMonoid {
    assert!(n >= 1, "carrier must be nonempty");
    loop {
        let leq = random_order(rng, n);
        let one = rng.gen_range(0..n);
        let mut t = vec![vec![None; n]; n];
        for x in 0..n {
            t[one][x] = Some(x);
            t[x][one] = Some(x);
        }
        let mut cells: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| a != one && b != one).collect();
        cells.shuffle(rng);
        let mut budget = 20_000;
        if partial_ok(&t, &leq) && fill(rng, &mut t, &cells, &leq, &mut budget) {
            let fus: Table2 = t.into_iter().map(|r| r.into_iter().map(|v| v.expect("filled")).collect()).collect();
            let zero = rng.gen_range(0..n);
            if let Ok(m) = PoMonoid::new(leq, fus, zero, one) {
                return m;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;
    use rand::SeedableRng;

    #[test]
    fn two_chain_has_all_properties() {
        let m = PoMonoid::from_algebra(&fixtures::two_chain()).unwrap();
        let r = check_property_equivalences(&m);
        assert!(r.consistent());
        assert!(r.rows.iter().all(|row| row.quasi && row.equation));
    }

    #[test]
    fn nilpotent_chain_fails_contraction_on_both_sides() {
        let m = PoMonoid::from_algebra(&fixtures::three_chain_nilpotent()).unwrap();
        let r = check_property_equivalences(&m);
        let c = r.rows.iter().find(|row| row.property == "c").unwrap();
        assert!(!c.quasi && !c.equation);
        assert!(r.consistent());
    }

    #[test]
    fn random_generation_is_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            for _ in 0..20 {
                let m = random_po_monoid(&mut rng, n);
                assert_eq!(m.size(), n);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_structures() {
        let leq = vec![vec![true, true], vec![false, true]];
        assert_eq!(PoMonoid::new(leq.clone(), vec![vec![0, 0], vec![0, 0]], 0, 1), Err(PoMonoidError::NotAMonoid));
        // swapping fusion values breaks monotonicity: 0 ≤ 1 but 0*0 = 1 > 0 = 1*0 ... with unit 0
        assert_eq!(PoMonoid::new(leq, vec![vec![0, 1], vec![1, 0]], 0, 0), Err(PoMonoidError::NotMonotone));
    }
}
