//! Closed-form degree distributions of Haros graphs.
//!
//! Two independent routes are provided: [`thm1_distribution`] reads the
//! distribution off the continued fraction of `x`, and [`thm2_eval`] evaluates
//! the piecewise-linear form determined by where `x` falls between the
//! fractions of two consecutive tree levels. Both are stated for
//! `x <= 1/2`; larger values use the mirror `P(k, x) = P(k, 1 - x)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{cf_expand, ContinuedFraction};
use crate::error::{HarosError, Result};
use crate::farey::{farey_len, farey_sequence, locate_for_degree, BracketSide};
use crate::graph::oracle_with_cap;
use crate::scalar::{ratio_string, Natural, Real};

/// Exact map from degree `k` to `P(k, x)`; zero probabilities are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDistribution<T: Natural = BigUint> {
    entries: BTreeMap<T, Ratio<T>>,
    denominator: T,
}

impl<T: Natural> DegreeDistribution<T> {
    /// The all-zero distribution used for `x = 0` and `x = 1`.
    pub fn empty(denominator: T) -> Self {
        DegreeDistribution {
            entries: BTreeMap::new(),
            denominator,
        }
    }

    pub fn from_entries(entries: BTreeMap<T, Ratio<T>>, denominator: T) -> Self {
        let entries = entries.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        DegreeDistribution {
            entries,
            denominator,
        }
    }

    fn insert(&mut self, k: T, p: Ratio<T>) {
        if !p.is_zero() {
            self.entries.insert(k, p);
        }
    }

    pub fn get(&self, k: &T) -> Ratio<T> {
        self.entries.get(k).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn entries(&self) -> &BTreeMap<T, Ratio<T>> {
        &self.entries
    }

    /// The denominator `q` of the graph's label.
    pub fn denominator(&self) -> &T {
        &self.denominator
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Largest degree with non-zero probability.
    pub fn max_degree(&self) -> Option<&T> {
        self.entries.keys().next_back()
    }

    pub fn total(&self) -> Ratio<T> {
        self.entries
            .values()
            .fold(Ratio::zero(), |acc, p| acc + p.clone())
    }

    /// `Σ k P(k)`.
    pub fn mean_degree(&self) -> Ratio<T> {
        self.entries.iter().fold(Ratio::zero(), |acc, (k, p)| {
            acc + p.clone() * Ratio::from_integer(k.clone())
        })
    }
}

/// One row of the truncation table: `r/s = [a_{l+1} - 1, a_{l+2}, ..., a_m]`
/// and the degree `k_l = a_1 + ... + a_l + 3` it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationRow<T = BigUint> {
    pub l: usize,
    pub r: T,
    pub s: T,
    pub degree: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationTable<T = BigUint> {
    pub rows: Vec<TruncationRow<T>>,
}

/// Rows `l = 1..m-1` of the truncation table for `[a_1, ..., a_m]`.
///
/// Uses suffix continuants `S_j = K(a_j, ..., a_m)`, so that
/// `s^(l) = K(a_{l+1} - 1, a_{l+2}, ...) = S_{l+1} - S_{l+2}` and
/// `r^(l) = S_{l+2}`; the whole table is one right-to-left pass.
pub fn truncation_table<T: Natural>(cf: &ContinuedFraction<T>) -> TruncationTable<T> {
    let a = cf.terms();
    let m = a.len();
    // suffix[j] = K(a_j..a_m) for 1-based j; suffix[m + 1] = 1, suffix[m + 2] = 0
    let mut suffix = vec![T::zero(); m + 3];
    suffix[m + 1] = T::one();
    for j in (1..=m).rev() {
        suffix[j] = a[j - 1].clone() * suffix[j + 1].clone() + suffix[j + 2].clone();
    }
    let mut rows = Vec::with_capacity(m.saturating_sub(1));
    let mut prefix = T::zero();
    for l in 1..m {
        prefix = prefix + a[l - 1].clone();
        rows.push(TruncationRow {
            l,
            r: suffix[l + 2].clone(),
            s: suffix[l + 1].clone() - suffix[l + 2].clone(),
            degree: prefix.clone() + T::from_u64_exact(3),
        });
    }
    TruncationTable { rows }
}

fn check_unit<T: Natural>(x: &Ratio<T>) -> Result<()> {
    if x.numer() > x.denom() {
        Err(HarosError::OutsideUnitInterval(ratio_string(x)))
    } else {
        Ok(())
    }
}

fn is_endpoint<T: Natural>(x: &Ratio<T>) -> bool {
    x.numer().is_zero() || x.numer() == x.denom()
}

/// `min(x, 1 - x)`.
pub fn fold_to_lower_half<T: Natural>(x: &Ratio<T>) -> Ratio<T> {
    let (p, q) = (x.numer(), x.denom());
    if p.clone() + p.clone() > *q {
        Ratio::new_raw(q.clone() - p.clone(), q.clone())
    } else {
        x.clone()
    }
}

/// The low-degree values `P(2, x)`, `P(3, x)`, `P(4, x)`:
/// `(x, 1 - 2x, 0)` below one half and `(1 - x, 2x - 1, 0)` above.
///
/// `P(4, 1/2) = 1/2` is not covered here (the boundary node of `G_{1/2}` has
/// degree 4), and both endpoints give zero by convention.
pub fn base_cases<T: Natural>(k: u32, x: &Ratio<T>) -> Result<Ratio<T>> {
    if !(2..=4).contains(&k) {
        return Err(HarosError::UnsupportedDegree {
            degree: k.to_string(),
            expected: "k in {2, 3, 4}",
        });
    }
    check_unit(x)?;
    if is_endpoint(x) {
        return Ok(Ratio::zero());
    }
    let y = fold_to_lower_half(x);
    Ok(match k {
        2 => y,
        3 => Ratio::one() - y.clone() - y,
        _ => Ratio::zero(),
    })
}

/// Full distribution from the continued fraction of `x`:
///
/// * `P(2) = p/q`, `P(3) = (q - 2p)/q`, `P(4) = 0`,
/// * `P(k_l) = s^(l)/q` for every truncation row,
/// * `P(a_1 + ... + a_m + 2) = 1/q` (the boundary node),
///
/// with `x > 1/2` evaluated at `1 - x`. Endpoints give the empty distribution.
pub fn thm1_distribution<T: Natural>(x: &Ratio<T>) -> Result<DegreeDistribution<T>> {
    check_unit(x)?;
    let q = x.denom().clone();
    if is_endpoint(x) {
        return Ok(DegreeDistribution::empty(q));
    }
    let y = fold_to_lower_half(x);
    let p = y.numer().clone();
    let cf = cf_expand(&y)?;
    let over_q = |n: T| Ratio::new(n, q.clone());

    let mut dist = DegreeDistribution::empty(q.clone());
    dist.insert(T::from_u64_exact(2), over_q(p.clone()));
    dist.insert(T::from_u64_exact(3), over_q(q.clone() - p.clone() - p));
    for row in truncation_table(&cf).rows {
        dist.insert(row.degree, over_q(row.s));
    }
    dist.insert(cf.term_sum() + T::from_u64_exact(2), over_q(T::one()));
    Ok(dist)
}

/// `P(k, x)` for `k >= 5` from the position of `x` among the level
/// `k - 3` pivots and their children:
///
/// * `q_low x - p_low` strictly between the lower child and the pivot,
/// * `p_up - q_up x` strictly between the pivot and the upper child,
/// * `1/q` on a child itself,
/// * `0` everywhere else (pivots and shallower fractions included).
pub fn thm2_eval<T: Natural>(k: &T, x: &Ratio<T>) -> Result<Ratio<T>> {
    check_unit(x)?;
    if is_endpoint(x) {
        if *k < T::from_u64_exact(5) {
            return Err(HarosError::UnsupportedDegree {
                degree: k.to_string(),
                expected: "k >= 5",
            });
        }
        return Ok(Ratio::zero());
    }
    let y = fold_to_lower_half(x);
    let located = locate_for_degree(k, &y)?;
    let (p, q) = (y.numer().clone(), y.denom().clone());
    let value = match (located.side, located.bracket) {
        (BracketSide::LowerSubinterval, Some(b)) => Ratio::new(
            b.lower.denom().clone() * p - b.lower.numer().clone() * q.clone(),
            q,
        ),
        (BracketSide::UpperSubinterval, Some(b)) => Ratio::new(
            b.upper.numer().clone() * q.clone() - b.upper.denom().clone() * p,
            q,
        ),
        (BracketSide::AtChildLevel, _) => Ratio::new(T::one(), q),
        _ => Ratio::zero(),
    };
    Ok(value)
}

/// Cap on the level (and so the largest degree) [`thm2_distribution`] scans.
pub const THM2_SCAN_CAP: u64 = 1_000_000;

/// Full distribution assembled from [`base_cases`] and [`thm2_eval`].
pub fn thm2_distribution<T: Natural>(x: &Ratio<T>) -> Result<DegreeDistribution<T>> {
    check_unit(x)?;
    let q = x.denom().clone();
    if is_endpoint(x) {
        return Ok(DegreeDistribution::empty(q));
    }
    let y = fold_to_lower_half(x);
    let level = cf_expand(&y)?.term_sum();
    let max_k = match level.to_u64() {
        Some(l) if l <= THM2_SCAN_CAP => l + 2,
        _ => return Err(HarosError::cap("tree level", &level, THM2_SCAN_CAP)),
    };
    let mut dist = DegreeDistribution::empty(q.clone());
    for k in 2..=3 {
        dist.insert(T::from_u64_exact(k as u64), base_cases(k, x)?);
    }
    // degree 4 only occurs as the boundary node of the level-2 graph G_{1/2}
    if max_k == 4 {
        dist.insert(T::from_u64_exact(4), Ratio::new(T::one(), q.clone()));
    }
    for k in 5..=max_k {
        let k = T::from_u64_exact(k);
        let p = thm2_eval(&k, x)?;
        dist.insert(k, p);
    }
    Ok(dist)
}

/// Exact rational value of a finite float (every float is dyadic).
pub fn float_to_rational<F: Real>(x: F) -> Option<Ratio<BigUint>> {
    if !x.is_finite() || x < F::zero() {
        return None;
    }
    let (mantissa, exponent, _) = x.integer_decode();
    let m = BigUint::from(mantissa);
    Some(if exponent >= 0 {
        Ratio::from_integer(m << exponent as usize)
    } else {
        Ratio::new(m, BigUint::one() << (-exponent) as usize)
    })
}

fn to_real<F: Real>(n: &BigUint) -> F {
    F::from_f64(n.to_f64().unwrap_or(f64::INFINITY)).unwrap_or_else(F::infinity)
}

fn ratio_to_real<F: Real>(x: &Ratio<BigUint>) -> F {
    F::from_f64(crate::scalar::to_f64(x)).unwrap_or_else(F::nan)
}

/// Real-valued extension of [`thm2_eval`] for `x` in `(0, 1)`.
///
/// The bracket is located exactly on the float's own (dyadic) rational value;
/// only the final linear piece is evaluated in `F`. Inputs within a few ulps
/// of any bracket fraction are rejected, because the side they fall on is not
/// meaningful at that resolution.
pub fn thm2_eval_real<F: Real>(k: u64, x: F) -> Result<F> {
    if !(x > F::zero() && x < F::one()) {
        return Err(HarosError::InvalidReal {
            x: format!("{x:?}"),
        });
    }
    let half = F::from_f64(0.5).unwrap();
    // exact for x in [1/2, 1)
    let y = if x > half { F::one() - x } else { x };
    let exact = float_to_rational(y).expect("finite positive float");
    let located = locate_for_degree(&BigUint::from(k), &exact)?;

    let tolerance = F::epsilon() * F::from_f64(4.0).unwrap() * y.max(F::min_positive_value());
    let ambiguous = |b: &Ratio<BigUint>| (y - ratio_to_real::<F>(b)).abs() <= tolerance;
    let bracket = match located.bracket {
        Some(b) => b,
        None => {
            // x is itself a fraction shallower than the pivots
            return Err(HarosError::AmbiguousBreakpoint {
                x: format!("{x:?}"),
                breakpoint: ratio_string(&exact),
            });
        }
    };
    for b in [&bracket.lower, &bracket.pivot, &bracket.upper] {
        if ambiguous(b) {
            return Err(HarosError::AmbiguousBreakpoint {
                x: format!("{x:?}"),
                breakpoint: ratio_string(b),
            });
        }
    }
    Ok(match located.side {
        BracketSide::LowerSubinterval => {
            to_real::<F>(bracket.lower.denom()) * y - to_real::<F>(bracket.lower.numer())
        }
        BracketSide::UpperSubinterval => {
            to_real::<F>(bracket.upper.numer()) - to_real::<F>(bracket.upper.denom()) * y
        }
        _ => F::zero(),
    })
}

/// One `(x, k)` row of a sweep, with all three routes evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow<T: Natural = BigUint> {
    pub x: Ratio<T>,
    pub k: T,
    pub thm1: Ratio<T>,
    pub thm2: Ratio<T>,
    pub oracle: Ratio<T>,
    /// `x` lies on level `k - 2` or shallower, where `P(k, ·)` departs from
    /// its linear pieces.
    pub removable: bool,
}

impl<T: Natural> SweepRow<T> {
    pub fn discrepancy(&self) -> Ratio<T> {
        let d = |a: &Ratio<T>, b: &Ratio<T>| {
            if a > b {
                a.clone() - b.clone()
            } else {
                b.clone() - a.clone()
            }
        };
        let a = d(&self.thm1, &self.thm2);
        let b = d(&self.thm1, &self.oracle);
        let c = d(&self.thm2, &self.oracle);
        a.max(b).max(c)
    }

    pub fn agrees(&self) -> bool {
        self.thm1 == self.thm2 && self.thm2 == self.oracle
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepTable<T: Natural = BigUint> {
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Natural> SweepTable<T> {
    pub fn max_discrepancy(&self) -> Ratio<T> {
        self.rows
            .iter()
            .map(SweepRow::discrepancy)
            .max()
            .unwrap_or_else(Ratio::zero)
    }

    pub fn removable_count(&self) -> usize {
        self.rows.iter().filter(|r| r.removable).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepLimits {
    pub max_rows: u64,
    pub max_oracle_q: u64,
}

impl Default for SweepLimits {
    fn default() -> Self {
        SweepLimits {
            max_rows: 5_000_000,
            max_oracle_q: 1_000_000,
        }
    }
}

/// Evaluates every `k` in `k_set` at every interior fraction of `F_n` by all
/// three routes. Rows come back sorted by `x`, then `k`, however the work was
/// scheduled.
pub fn sweep<T: Natural>(k_set: &[T], n: &T, limits: &SweepLimits) -> Result<SweepTable<T>> {
    let five = T::from_u64_exact(5);
    if let Some(bad) = k_set.iter().find(|k| **k < five) {
        return Err(HarosError::UnsupportedDegree {
            degree: bad.to_string(),
            expected: "k >= 5",
        });
    }
    if n.is_zero() {
        return Err(HarosError::InvalidOrder);
    }
    let mut ks = k_set.to_vec();
    ks.sort();
    ks.dedup();

    let fractions = n.to_u64().and_then(farey_len);
    let rows = fractions.map(|len| (len - 2).saturating_mul(ks.len() as u64));
    match rows {
        Some(rows) if rows <= limits.max_rows => {}
        Some(rows) => return Err(HarosError::cap("sweep rows", rows, limits.max_rows)),
        None => return Err(HarosError::cap("Farey order", n, limits.max_rows)),
    }

    let farey = farey_sequence(n)?;
    let interior = &farey[1..farey.len() - 1];
    let chunks: Result<Vec<Vec<SweepRow<T>>>> = interior
        .par_iter()
        .map(|x| {
            let thm1 = thm1_distribution(x)?;
            let oracle = oracle_with_cap(x, limits.max_oracle_q)?;
            let y = fold_to_lower_half(x);
            ks.iter()
                .map(|k| {
                    let side = locate_for_degree(k, &y)?;
                    let removable = side.bracket.is_none()
                        || matches!(side.side, BracketSide::AtPivot | BracketSide::AtChildLevel);
                    Ok(SweepRow {
                        x: x.clone(),
                        k: k.clone(),
                        thm1: thm1.get(k),
                        thm2: thm2_eval(k, x)?,
                        oracle: oracle.get(k),
                        removable,
                    })
                })
                .collect()
        })
        .collect();
    Ok(SweepTable {
        rows: chunks?.into_iter().flatten().collect(),
    })
}
