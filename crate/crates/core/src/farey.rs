//! Farey sequences and the Farey binary tree on `[0, 1]`.
//!
//! The tree is navigated Stern–Brocot style: the virtual root is `1/1`
//! bracketed by `0/1` and `1/0`, so a single `L` step reaches `1/2` and the
//! value `[a_1, ..., a_m]` sits at the end of `L^{a_1} R^{a_2} ... X^{a_m - 1}`.
//! Level `ℓ_k` of the tree holds the values whose terms sum to `k`.

use std::fmt;

use num_rational::Ratio;


use crate::arith::{cf_expand, ContinuedFraction};
use crate::error::{HarosError, Result};
use crate::scalar::{ratio_string, Natural};

/// Deepest level [`tree_level`] will materialise (`2^(k-2)` fractions).
pub const MAX_TREE_LEVEL: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    L,
    R,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::L => Direction::R,
            Direction::R => Direction::L,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::L => "L",
            Direction::R => "R",
        })
    }
}

/// Run-length encoded descent word, symbols strictly alternating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicPath<T = num_bigint::BigUint> {
    runs: Vec<(Direction, T)>,
}

impl<T: Natural> SymbolicPath<T> {
    pub fn runs(&self) -> &[(Direction, T)] {
        &self.runs
    }

    pub fn run_lengths(&self) -> Vec<T> {
        self.runs.iter().map(|(_, c)| c.clone()).collect()
    }

    /// Total number of steps.
    pub fn len(&self) -> T {
        self.runs.iter().fold(T::zero(), |acc, (_, c)| acc + c.clone())
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Expanded word such as `LLRRRLL`. The caller is responsible for the
    /// length being reasonable.
    pub fn word(&self) -> String {
        let mut out = String::new();
        for (dir, count) in &self.runs {
            let n = count.to_usize().expect("run too long to expand");
            let sym = dir.to_string();
            out.push_str(&sym.repeat(n));
        }
        out
    }

    /// Replays the path from the root by mediant navigation and returns the
    /// node it ends on.
    pub fn replay(&self) -> Ratio<T> {
        let node = walk(self.runs.iter().cloned());
        Ratio::new_raw(node.mid.0, node.mid.1)
    }
}

impl<T: Natural> fmt::Display for SymbolicPath<T> {
    /// Compact form, e.g. `L^2R^3L^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (dir, count) in &self.runs {
            if count.is_one() {
                write!(f, "{dir}")?;
            } else {
                write!(f, "{dir}^{count}")?;
            }
        }
        Ok(())
    }
}

/// A tree node together with its two Farey parents (`lower < value < upper`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode<T: Natural = num_bigint::BigUint> {
    pub value: Ratio<T>,
    pub lower: Ratio<T>,
    pub upper: Ratio<T>,
}

impl<T: Natural> TreeNode<T> {
    /// The two mediant children, smaller first.
    pub fn children(&self) -> (Ratio<T>, Ratio<T>) {
        (
            raw_mediant(&self.lower, &self.value),
            raw_mediant(&self.value, &self.upper),
        )
    }

    pub fn child_nodes(&self) -> (TreeNode<T>, TreeNode<T>) {
        let (left, right) = self.children();
        (
            TreeNode {
                value: left,
                lower: self.lower.clone(),
                upper: self.value.clone(),
            },
            TreeNode {
                value: right,
                lower: self.value.clone(),
                upper: self.upper.clone(),
            },
        )
    }
}

/// One level `ℓ_k` of the Farey binary tree, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLevel<T: Natural = num_bigint::BigUint> {
    pub index: usize,
    pub fractions: Vec<Ratio<T>>,
}

/// Navigation state: the current node and the two fractions bracketing it.
/// `hi` may be the improper `1/0` above the root.
#[derive(Debug, Clone)]
struct Walk<T> {
    lo: (T, T),
    mid: (T, T),
    hi: (T, T),
}

fn root<T: Natural>() -> Walk<T> {
    Walk {
        lo: (T::zero(), T::one()),
        mid: (T::one(), T::one()),
        hi: (T::one(), T::zero()),
    }
}

fn scale_add<T: Natural>(c: &T, a: &(T, T), b: &(T, T)) -> (T, T) {
    (
        c.clone() * a.0.clone() + b.0.clone(),
        c.clone() * a.1.clone() + b.1.clone(),
    )
}

impl<T: Natural> Walk<T> {
    /// `count >= 1` steps in one direction, in O(1) arithmetic.
    fn run(&mut self, dir: Direction, count: &T) {
        if count.is_zero() {
            return;
        }
        let before = count.clone() - T::one();
        match dir {
            Direction::L => {
                let hi = scale_add(&before, &self.lo, &self.mid);
                self.mid = scale_add(count, &self.lo, &self.mid);
                self.hi = hi;
            }
            Direction::R => {
                let lo = scale_add(&before, &self.hi, &self.mid);
                self.mid = scale_add(count, &self.hi, &self.mid);
                self.lo = lo;
            }
        }
    }

    fn into_node(self) -> TreeNode<T> {
        TreeNode {
            value: Ratio::new_raw(self.mid.0, self.mid.1),
            lower: Ratio::new_raw(self.lo.0, self.lo.1),
            upper: Ratio::new_raw(self.hi.0, self.hi.1),
        }
    }
}

fn walk<T: Natural>(runs: impl IntoIterator<Item = (Direction, T)>) -> Walk<T> {
    let mut w = root();
    for (dir, count) in runs {
        w.run(dir, &count);
    }
    w
}

fn raw_mediant<T: Natural>(a: &Ratio<T>, b: &Ratio<T>) -> Ratio<T> {
    Ratio::new_raw(
        a.numer().clone() + b.numer().clone(),
        a.denom().clone() + b.denom().clone(),
    )
}

/// `true` when `left < right` and `right.p * left.q - left.p * right.q == 1`.
pub fn are_adjacent<T: Natural>(left: &Ratio<T>, right: &Ratio<T>) -> bool {
    let lhs = right.numer().clone() * left.denom().clone();
    let rhs = left.numer().clone() * right.denom().clone() + T::one();
    lhs == rhs
}

fn check_unit<T: Natural>(x: &Ratio<T>) -> Result<()> {
    if x.numer() > x.denom() {
        Err(HarosError::OutsideUnitInterval(ratio_string(x)))
    } else {
        Ok(())
    }
}

/// Mediant `(p + r)/(q + s)` of two Farey neighbours `p/q < r/s` in `[0, 1]`.
pub fn mediant<T: Natural>(left: &Ratio<T>, right: &Ratio<T>) -> Result<Ratio<T>> {
    check_unit(left)?;
    check_unit(right)?;
    if !are_adjacent(left, right) {
        return Err(HarosError::NotAdjacent {
            left: ratio_string(left),
            right: ratio_string(right),
        });
    }
    Ok(raw_mediant(left, right))
}

/// Farey sequence `F_n`: every reduced fraction in `[0, 1]` with denominator
/// at most `n`, increasing.
pub fn farey_sequence<T: Natural>(n: &T) -> Result<Vec<Ratio<T>>> {
    if n.is_zero() {
        return Err(HarosError::InvalidOrder);
    }
    let mut out = Vec::new();
    if let Some(len) = n.to_u64().and_then(farey_len) {
        out.reserve(len.min(1 << 24) as usize);
    }
    // next-term recurrence: (a/b, c/d) -> (c/d, (k c - a)/(k d - b))
    let (mut a, mut b) = (T::zero(), T::one());
    let (mut c, mut d) = (T::one(), n.clone());
    out.push(Ratio::new_raw(a.clone(), b.clone()));
    while c <= *n {
        out.push(Ratio::new_raw(c.clone(), d.clone()));
        let k = (n.clone() + b.clone()) / d.clone();
        let next_c = k.clone() * c.clone() - a;
        let next_d = k * d.clone() - b;
        a = c;
        b = d;
        c = next_c;
        d = next_d;
    }
    Ok(out)
}

/// `|F_n| = 1 + φ(1) + ... + φ(n)`, or `None` if `n` is zero or too large
/// to sieve.
pub fn farey_len(n: u64) -> Option<u64> {
    if n == 0 || n > 50_000_000 {
        return None;
    }
    let n = n as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            for j in (i..=n).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    Some(1 + phi[1..].iter().sum::<u64>())
}

/// Tree nodes of level `k >= 2`, with their Farey parents.
pub fn tree_level_nodes<T: Natural>(k: usize) -> Result<Vec<TreeNode<T>>> {
    if k < 2 {
        return Err(HarosError::InvalidTerms(format!(
            "level {k} has no interior nodes"
        )));
    }
    if k > MAX_TREE_LEVEL {
        return Err(HarosError::cap("tree level", k, MAX_TREE_LEVEL));
    }
    let mut level = vec![root::<T>().into_node().child_nodes().0];
    for _ in 2..k {
        level = level
            .iter()
            .flat_map(|node| {
                let (a, b) = node.child_nodes();
                [a, b]
            })
            .collect();
    }
    Ok(level)
}

/// Level `ℓ_k` of the Farey binary tree (`ℓ_1 = {0/1, 1/1}`).
pub fn tree_level<T: Natural>(k: usize) -> Result<TreeLevel<T>> {
    let fractions = match k {
        0 => return Err(HarosError::InvalidTerms("tree levels start at 1".into())),
        1 => vec![Ratio::new_raw(T::zero(), T::one()), Ratio::new_raw(T::one(), T::one())],
        k => tree_level_nodes::<T>(k)?.into_iter().map(|n| n.value).collect(),
    };
    Ok(TreeLevel { index: k, fractions })
}

/// Index of the level holding `x` (`1` for `0/1` and `1/1`).
pub fn level_of<T: Natural>(x: &Ratio<T>) -> Result<T> {
    check_unit(x)?;
    if x.numer().is_zero() {
        return Ok(T::one());
    }
    Ok(cf_expand(x)?.term_sum())
}

fn path_from_cf<T: Natural>(cf: &ContinuedFraction<T>) -> SymbolicPath<T> {
    let m = cf.len();
    let mut runs = Vec::with_capacity(m);
    let mut dir = Direction::L;
    for (i, a) in cf.terms().iter().enumerate() {
        let count = if i + 1 == m { a.clone() - T::one() } else { a.clone() };
        if !count.is_zero() {
            runs.push((dir, count));
        }
        dir = dir.flip();
    }
    SymbolicPath { runs }
}

fn interior_cf<T: Natural>(x: &Ratio<T>) -> Result<ContinuedFraction<T>> {
    check_unit(x)?;
    if x.numer().is_zero() || x.numer() == x.denom() {
        return Err(HarosError::NoDescentPath(ratio_string(x)));
    }
    cf_expand(x)
}

/// Descent word from the root to `x` in `(0, 1)`.
pub fn symbolic_path<T: Natural>(x: &Ratio<T>) -> Result<SymbolicPath<T>> {
    Ok(path_from_cf(&interior_cf(x)?))
}

/// `x` with its Farey parents, found by replaying its path.
pub fn tree_node<T: Natural>(x: &Ratio<T>) -> Result<TreeNode<T>> {
    let path = symbolic_path(x)?;
    Ok(walk(path.runs).into_node())
}

/// The two mediant children of `x`, smaller first.
pub fn tree_children<T: Natural>(x: &Ratio<T>) -> Result<(Ratio<T>, Ratio<T>)> {
    Ok(tree_node(x)?.children())
}

/// The node on the path to `x` that sits on level `level`
/// (`2 <= level <= level_of(x)`).
pub fn ancestor_at_level<T: Natural>(x: &Ratio<T>, level: &T) -> Result<TreeNode<T>> {
    let cf = interior_cf(x)?;
    let depth = cf.term_sum();
    if *level < T::one() + T::one() || *level > depth {
        return Err(HarosError::InvalidTerms(format!(
            "level {level} is not on the path to {} (levels 2..={depth})",
            ratio_string(x)
        )));
    }
    let mut remaining = level.clone() - T::one();
    let mut w = root();
    for (dir, count) in path_from_cf(&cf).runs {
        if remaining.is_zero() {
            break;
        }
        let step = if count < remaining { count } else { remaining.clone() };
        remaining = remaining - step.clone();
        w.run(dir, &step);
    }
    Ok(w.into_node())
}

/// A pivot of `ℓ_{k-3}` with its two children in `ℓ_{k-2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket<T: Natural = num_bigint::BigUint> {
    pub lower: Ratio<T>,
    pub pivot: Ratio<T>,
    pub upper: Ratio<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BracketSide {
    /// Strictly between the lower child and the pivot.
    LowerSubinterval,
    /// Strictly between the pivot and the upper child.
    UpperSubinterval,
    /// Exactly on the pivot (level `k - 3`).
    AtPivot,
    /// Exactly on a child of the pivot (level `k - 2`).
    AtChildLevel,
    /// Shallower than the pivots, or below a child but outside its bracket.
    Elsewhere,
}

/// Where `x` falls relative to the level-`(k-3)` brackets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnclosingBracket<T: Natural = num_bigint::BigUint> {
    /// `None` only when `x` is shallower than level `k - 3`.
    pub bracket: Option<Bracket<T>>,
    pub side: BracketSide,
}

/// Locates `x` against the brackets `(lower, pivot, upper)` formed by each
/// pivot of `ℓ_{k-3}` and its children, for a degree `k >= 5`.
///
/// Only the pivot on `x`'s own path is examined, so the cost is linear in the
/// number of continued-fraction terms regardless of `k`.
pub fn locate_for_degree<T: Natural>(k: &T, x: &Ratio<T>) -> Result<EnclosingBracket<T>> {
    let five = T::from_u64_exact(5);
    if *k < five {
        return Err(HarosError::UnsupportedDegree {
            degree: k.to_string(),
            expected: "k >= 5",
        });
    }
    let depth = level_of(x)?;
    let pivot_level = k.clone() - T::from_u64_exact(3);
    if depth < pivot_level {
        return Ok(EnclosingBracket {
            bracket: None,
            side: BracketSide::Elsewhere,
        });
    }
    let pivot = ancestor_at_level(x, &pivot_level)?;
    let (lower, upper) = pivot.children();
    let side = if depth == pivot_level {
        BracketSide::AtPivot
    } else if *x == lower || *x == upper {
        BracketSide::AtChildLevel
    } else if lower < *x && *x < pivot.value {
        BracketSide::LowerSubinterval
    } else if pivot.value < *x && *x < upper {
        BracketSide::UpperSubinterval
    } else {
        BracketSide::Elsewhere
    };
    Ok(EnclosingBracket {
        bracket: Some(Bracket {
            lower,
            pivot: pivot.value,
            upper,
        }),
        side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: u64, q: u64) -> Ratio<u64> {
        Ratio::new(p, q)
    }

    #[test]
    fn mediant_examples() {
        assert_eq!(mediant(&r(1, 4), &r(1, 3)).unwrap(), r(2, 7));
        assert_eq!(mediant(&r(0, 1), &r(1, 1)).unwrap(), r(1, 2));
        assert_eq!(mediant(&r(1, 3), &r(1, 2)).unwrap(), r(2, 5));
    }

    #[test]
    fn mediant_rejects_non_neighbours() {
        assert!(matches!(
            mediant(&r(1, 4), &r(1, 2)),
            Err(HarosError::NotAdjacent { .. })
        ));
        // wrong order
        assert!(mediant(&r(1, 2), &r(1, 3)).is_err());
    }

    #[test]
    fn farey_examples() {
        assert_eq!(farey_sequence(&1u64).unwrap(), vec![r(0, 1), r(1, 1)]);
        assert_eq!(
            farey_sequence(&2u64).unwrap(),
            vec![r(0, 1), r(1, 2), r(1, 1)]
        );
        let f5: Vec<_> = [(0, 1), (1, 5), (1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (1, 1)]
            .iter()
            .map(|&(p, q)| r(p, q))
            .collect();
        assert_eq!(farey_sequence(&5u64).unwrap(), f5);
        assert_eq!(farey_sequence(&0u64), Err(HarosError::InvalidOrder));
    }

    #[test]
    fn farey_len_matches_enumeration() {
        for n in 1..60u64 {
            assert_eq!(
                farey_len(n).unwrap(),
                farey_sequence(&n).unwrap().len() as u64
            );
        }
    }

    #[test]
    fn first_levels() {
        assert_eq!(tree_level::<u64>(1).unwrap().fractions, vec![r(0, 1), r(1, 1)]);
        assert_eq!(tree_level::<u64>(2).unwrap().fractions, vec![r(1, 2)]);
        assert_eq!(tree_level::<u64>(3).unwrap().fractions, vec![r(1, 3), r(2, 3)]);
        assert_eq!(
            tree_level::<u64>(4).unwrap().fractions,
            vec![r(1, 4), r(2, 5), r(3, 5), r(3, 4)]
        );
        assert!(tree_level::<u64>(MAX_TREE_LEVEL + 1)
            .unwrap_err()
            .is_resource_cap());
    }

    #[test]
    fn path_examples() {
        let p = symbolic_path(&r(10, 23)).unwrap();
        assert_eq!(p.word(), "LLRRRLL");
        assert_eq!(p.to_string(), "L^2R^3L^2");
        assert_eq!(symbolic_path(&r(1, 2)).unwrap().word(), "L");
        assert_eq!(symbolic_path(&r(2, 5)).unwrap().word(), "LLR");
        assert_eq!(symbolic_path(&r(2, 3)).unwrap().word(), "LR");
        assert!(matches!(
            symbolic_path(&r(0, 1)),
            Err(HarosError::NoDescentPath(_))
        ));
        assert!(symbolic_path(&r(1, 1)).is_err());
    }

    #[test]
    fn replay_lands_on_target() {
        for x in [r(10, 23), r(1, 2), r(2, 5), r(7, 9), r(1, 17)] {
            assert_eq!(symbolic_path(&x).unwrap().replay(), x);
        }
    }

    #[test]
    fn children_examples() {
        assert_eq!(tree_children(&r(1, 2)).unwrap(), (r(1, 3), r(2, 3)));
        assert_eq!(tree_children(&r(1, 3)).unwrap(), (r(1, 4), r(2, 5)));
        assert_eq!(tree_children(&r(3, 7)).unwrap(), (r(5, 12), r(4, 9)));
    }

    #[test]
    fn ancestors() {
        let x = r(10, 23);
        assert_eq!(ancestor_at_level(&x, &2).unwrap().value, r(1, 2));
        assert_eq!(ancestor_at_level(&x, &3).unwrap().value, r(1, 3));
        assert_eq!(ancestor_at_level(&x, &4).unwrap().value, r(2, 5));
        assert_eq!(ancestor_at_level(&x, &8).unwrap().value, x);
        assert!(ancestor_at_level(&x, &9).is_err());
    }

    #[test]
    fn locate_examples() {
        let b = locate_for_degree(&5, &r(2, 5)).unwrap();
        assert_eq!(b.side, BracketSide::LowerSubinterval);
        assert_eq!(
            b.bracket.unwrap(),
            Bracket { lower: r(1, 3), pivot: r(1, 2), upper: r(2, 3) }
        );
        assert_eq!(locate_for_degree(&5, &r(1, 3)).unwrap().side, BracketSide::AtChildLevel);
        assert_eq!(locate_for_degree(&5, &r(1, 2)).unwrap().side, BracketSide::AtPivot);
        let b = locate_for_degree(&6, &r(2, 7)).unwrap();
        assert_eq!(b.side, BracketSide::LowerSubinterval);
        assert_eq!(
            b.bracket.unwrap(),
            Bracket { lower: r(1, 4), pivot: r(1, 3), upper: r(2, 5) }
        );
        assert_eq!(locate_for_degree(&5, &r(1, 4)).unwrap().side, BracketSide::Elsewhere);
        assert_eq!(locate_for_degree(&7, &r(1, 3)).unwrap().bracket, None);
        assert!(locate_for_degree(&4, &r(1, 3)).is_err());
    }
}
