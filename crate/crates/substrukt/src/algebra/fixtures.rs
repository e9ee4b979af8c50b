//! Small named algebras used throughout the tests and documentation.

use super::{ExtraOps, FiniteAlgebra, Table2};

fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

fn chain_join(n: usize) -> Table2 {
    (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect()
}

fn chain_meet(n: usize) -> Table2 {
    (0..n).map(|a| (0..n).map(|b| a.min(b)).collect()).collect()
}

/// A chain `0 < … < 1` with fusion equal to meet, `0` the bottom and `1` the top.
fn meet_chain(ns: &[&str]) -> FiniteAlgebra {
    let n = ns.len();
    FiniteAlgebra::new(
        names(ns),
        chain_join(n),
        chain_meet(n),
        0,
        n - 1,
        ExtraOps { meet: Some(chain_meet(n)), ..ExtraOps::default() },
    )
    .expect("valid fixture")
}

/// The two-element Boolean monoid `{0 < 1}` with `* = ∧` (no meet table).
pub fn two_chain() -> FiniteAlgebra {
    FiniteAlgebra::new(names(&["0", "1"]), chain_join(2), chain_meet(2), 0, 1, ExtraOps::default()).expect("valid fixture")
}

/// The four-element chain `0 < a < b < 1` with `* = ∧`, a pointed ℓ-monoid
/// in every structural variety.
pub fn four_chain() -> FiniteAlgebra {
    meet_chain(&["0", "a", "b", "1"])
}

/// The five-element chain `0 < a < b < c < 1` with `* = ∧` and both
/// negations equal to `¬`, where `¬0 = 1` and `¬x = 0` otherwise.
pub fn five_chain_pseudo() -> FiniteAlgebra {
    let base = meet_chain(&["0", "a", "b", "c", "1"]);
    let neg = vec![4, 0, 0, 0, 0];
    let mut extra = base.extra_ops();
    extra.rneg = Some(neg.clone());
    extra.lneg = Some(neg);
    base.with_extra(extra).expect("valid fixture")
}

/// The diamond `0 < a, b < 1` (`a`, `b` incomparable) with the commutative
/// fusion that kills every product of two non-units. Fusion is monotone but
/// does not distribute over join: `(a ∨ b) * b = b` while `a*b ∨ b*b = 0`.
pub fn diamond() -> FiniteAlgebra {
    // indices: 0 = "0", 1 = "a", 2 = "b", 3 = "1"
    let join = vec![vec![0, 1, 2, 3], vec![1, 1, 3, 3], vec![2, 3, 2, 3], vec![3, 3, 3, 3]];
    let fus = vec![vec![0, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 0, 2], vec![0, 1, 2, 3]];
    let meet = vec![vec![0, 0, 0, 0], vec![0, 1, 0, 1], vec![0, 0, 2, 2], vec![0, 1, 2, 3]];
    FiniteAlgebra::new(names(&["0", "a", "b", "1"]), join, fus, 0, 3, ExtraOps { meet: Some(meet), ..ExtraOps::default() })
        .expect("valid fixture")
}

/// The chain `0 < a < 1` with `a * a = 0`, `0` absorbing and `1` the unit.
pub fn three_chain_nilpotent() -> FiniteAlgebra {
    let fus = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 2]];
    FiniteAlgebra::new(names(&["0", "a", "1"]), chain_join(3), fus, 0, 2, ExtraOps::default()).expect("valid fixture")
}
