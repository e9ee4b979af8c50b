//! Enumeration of small algebras up to isomorphism.
//!
//! The steps are:
//! 1. enumerate join-semilattice orders on `{0..n-1}` up to isomorphism;
//! 2. for each unit `1`, fill the fusion table by backtracking, pruning on
//!    associativity and on distributivity over join (which implies
//!    monotonicity);
//! 3. choose `0`, and derive the remaining operations the family needs
//!    (meet, pseudocomplements, residuals);
//! 4. keep the structures in the variety and deduplicate them by a canonical
//!    form. The canonical form is the lexicographically least encoding over
//!    all relabellings of the carrier.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{
    check_variety, derive_fl, derive_meet, derive_pseudocomplements, derive_residuals, ExtraOps, Family, FiniteAlgebra,
    Table2, VarietyId,
};

/// Largest carrier size [`enumerate_algebras`] accepts.
pub const MAX_ENUMERATION_SIZE: usize = 5;

/// Errors raised by [`enumerate_algebras`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    /// The requested size exceeds [`MAX_ENUMERATION_SIZE`] or is zero.
    #[error("size-too-large: can enumerate sizes 1..={max}, asked for {0}", max = MAX_ENUMERATION_SIZE)]
    SizeTooLarge(usize),
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Encoding of `(join, fus, zero, one)` after relabelling by `p` (old index `i` becomes `p[i]`).
fn encode(join: &Table2, fus: &Table2, zero: usize, one: usize, p: &[usize], inv: &[usize]) -> Vec<usize> {
    let n = p.len();
    let mut out = Vec::with_capacity(2 * n * n + 2);
    out.push(p[zero]);
    out.push(p[one]);
    for t in [join, fus] {
        for i in 0..n {
            for j in 0..n {
                out.push(p[t[inv[i]][inv[j]]]);
            }
        }
    }
    out
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

fn permute_t2(t: &Table2, p: &[usize], inv: &[usize]) -> Table2 {
    let n = p.len();
    (0..n).map(|i| (0..n).map(|j| p[t[inv[i]][inv[j]]]).collect()).collect()
}

/// The join-semilattice orders on `n` points, up to isomorphism, as join tables.
fn semilattices(n: usize, perms: &[Vec<usize>]) -> Vec<Table2> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen: BTreeMap<Vec<usize>, Table2> = BTreeMap::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                leq[i][j] = true;
            }
        }
        let transitive = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(leq[a][b] && leq[b][c]) || leq[a][c])));
        if !transitive {
            continue;
        }
        let mut join = vec![vec![0; n]; n];
        let mut ok = true;
        'pairs: for a in 0..n {
            for b in 0..n {
                let ub: Vec<usize> = (0..n).filter(|&u| leq[a][u] && leq[b][u]).collect();
                match ub.iter().copied().find(|&m| ub.iter().all(|&u| leq[m][u])) {
                    Some(m) => join[a][b] = m,
                    None => {
                        ok = false;
                        break 'pairs;
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let key = perms
            .iter()
            .map(|p| {
                let inv = inverse(p);
                permute_t2(&join, p, &inv).into_iter().flatten().collect::<Vec<_>>()
            })
            .min()
            .expect("at least one permutation");
        seen.entry(key).or_insert(join);
    }
    seen.into_values().collect()
}

struct FusSearch<'a> {
    join: &'a Table2,
    n: usize,
    commutative: bool,
    contractive: bool,
    t: Vec<Vec<Option<usize>>>,
    out: Vec<Table2>,
}

impl FusSearch<'_> {
    fn leq(&self, a: usize, b: usize) -> bool {
        self.join[a][b] == b
    }

    fn ok_at(&self, a: usize, b: usize) -> bool {
        let n = self.n;
        let t = &self.t;
        let j = self.join;
        if self.contractive && a == b {
            if let Some(v) = t[a][a] {
                if !self.leq(a, v) {
                    return false;
                }
            }
        }
        for y in 0..n {
            for z in 0..n {
                // row a: a*(y∨z) = a*y ∨ a*z
                if let (Some(l), Some(p), Some(q)) = (t[a][j[y][z]], t[a][y], t[a][z]) {
                    if l != j[p][q] {
                        return false;
                    }
                }
                // column b: (y∨z)*b = y*b ∨ z*b
                if let (Some(l), Some(p), Some(q)) = (t[j[y][z]][b], t[y][b], t[z][b]) {
                    if l != j[p][q] {
                        return false;
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let Some(xy) = t[x][y] else { continue };
                for z in 0..n {
                    if let (Some(l), Some(yz)) = (t[xy][z], t[y][z]) {
                        if let Some(r) = t[x][yz] {
                            if l != r {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, cells: &[(usize, usize)]) {
        let Some((&(a, b), rest)) = cells.split_first() else {
            self.out.push(self.t.iter().map(|r| r.iter().map(|v| v.expect("filled")).collect()).collect());
            return;
        };
        for v in 0..self.n {
            self.t[a][b] = Some(v);
            if self.commutative {
                self.t[b][a] = Some(v);
            }
            if self.ok_at(a, b) && (!self.commutative || self.ok_at(b, a)) {
                self.run(rest);
            }
        }
        self.t[a][b] = None;
        if self.commutative {
            self.t[b][a] = None;
        }
    }
}

fn expand(family: Family, base: &FiniteAlgebra) -> Option<FiniteAlgebra> {
    match family {
        Family::Msl => Some(base.clone()),
        Family::Ml => derive_meet(base).ok(),
        Family::PMsl => derive_pseudocomplements(base).ok(),
        Family::PMl => derive_pseudocomplements(&derive_meet(base).ok()?).ok(),
        Family::FL => derive_fl(base).ok(),
        Family::RL => derive_residuals(&derive_meet(base).ok()?).ok(),
    }
}

fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// All algebras of the variety on an `n`-element carrier, up to isomorphism,
/// in a deterministic order. Elements are named `a`, `b`, ….
///
/// For [`Family::RL`] the constant `0` is set equal to `1` (the family has no `0`).
pub fn enumerate_algebras(v: &VarietyId, n: usize) -> Result<Vec<FiniteAlgebra>, EnumerateError> {
    if n == 0 || n > MAX_ENUMERATION_SIZE {
        return Err(EnumerateError::SizeTooLarge(n));
    }
    let perms = permutations(n);
    let needs_bottom = matches!(v.family, Family::Ml | Family::PMl | Family::FL | Family::RL);
    let mut found: BTreeMap<Vec<usize>, FiniteAlgebra> = BTreeMap::new();
    for join in semilattices(n, &perms) {
        let leq = |a: usize, b: usize| join[a][b] == b;
        let bottom = (0..n).find(|&a| (0..n).all(|b| leq(a, b)));
        if needs_bottom && bottom.is_none() {
            continue;
        }
        let top = (0..n).fold(0, |acc, a| join[acc][a]);
        for one in 0..n {
            if v.sigma.wl && one != top {
                continue;
            }
            let mut s = FusSearch {
                join: &join,
                n,
                commutative: v.sigma.e,
                contractive: v.sigma.c,
                t: vec![vec![None; n]; n],
                out: Vec::new(),
            };
            for x in 0..n {
                s.t[one][x] = Some(x);
                s.t[x][one] = Some(x);
            }
            if !s.ok_at(one, one) {
                continue;
            }
            let cells: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| a != one && b != one && (!v.sigma.e || a <= b))
                .collect();
            s.run(&cells);
            for fus in std::mem::take(&mut s.out) {
                let zeros: Vec<usize> = if v.family == Family::RL {
                    vec![one]
                } else if v.sigma.wr {
                    bottom.into_iter().collect()
                } else {
                    (0..n).collect()
                };
                for zero in zeros {
                    let (key, p) = perms
                        .iter()
                        .map(|p| (encode(&join, &fus, zero, one, p, &inverse(p)), p))
                        .min()
                        .expect("at least one permutation");
                    if found.contains_key(&key) {
                        continue;
                    }
                    let inv = inverse(p);
                    let base = FiniteAlgebra::new(
                        default_names(n),
                        permute_t2(&join, p, &inv),
                        permute_t2(&fus, p, &inv),
                        p[zero],
                        p[one],
                        ExtraOps::default(),
                    )
                    .expect("enumerated tables are valid");
                    let Some(full) = expand(v.family, &base) else { continue };
                    if check_variety(&full, v).map(|r| r.holds()).unwrap_or(false) {
                        found.insert(key, full);
                    }
                }
            }
        }
    }
    Ok(found.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Sigma;

    #[test]
    fn trivial_algebra_is_unique() {
        for f in Family::ALL {
            assert_eq!(enumerate_algebras(&VarietyId::new(f, Sigma::empty()), 1).unwrap().len(), 1, "{f}");
        }
    }

    #[test]
    fn size_guard() {
        let v = VarietyId::new(Family::Msl, Sigma::empty());
        assert_eq!(enumerate_algebras(&v, 6), Err(EnumerateError::SizeTooLarge(6)));
        assert_eq!(enumerate_algebras(&v, 0), Err(EnumerateError::SizeTooLarge(0)));
    }

    #[test]
    fn two_element_fl_ewc_is_boolean() {
        let v = VarietyId::new(Family::FL, Sigma::all_rules());
        let all = enumerate_algebras(&v, 2).unwrap();
        assert_eq!(all.len(), 1);
        let a = &all[0];
        assert!(a.leq(a.zero(), a.one()) && a.zero() != a.one());
    }

    #[test]
    fn semilattice_counts() {
        // Join-semilattices up to isomorphism on 1..=4 points: 1, 1, 2, 5.
        for (n, count) in [(1, 1), (2, 1), (3, 2), (4, 5)] {
            assert_eq!(semilattices(n, &permutations(n)).len(), count, "n = {n}");
        }
    }
}
