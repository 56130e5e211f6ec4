//! Cross-checking suites: continuant identities, path/continued-fraction
//! round trips, agreement of the three distribution routes, the descent
//! recurrences along the tree, and the piecewise-linear shape in `x`.
//!
//! Every suite is deterministic and reports the first counterexample it finds
//! as exact fractions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{cf_expand, cf_value, continuant, ContinuedFraction};
use crate::dist::{thm1_distribution, thm2_eval, DegreeDistribution};
use crate::error::{HarosError, Result};
use crate::farey::{farey_sequence, MAX_TREE_LEVEL, symbolic_path, tree_children, tree_level_nodes};
use crate::graph::{build, distribution_of, identify_boundary, HarosGraph};
use crate::scalar::{ratio_string, to_signed, Natural};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub suite: String,
    pub passed: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>) -> Self {
        CheckReport {
            suite: suite.into(),
            passed: 0,
            failed: 0,
            first_failure: None,
        }
    }

    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    /// Folds `other` in; an earlier failure keeps precedence.
    pub fn absorb(&mut self, other: CheckReport) {
        self.passed += other.passed;
        self.failed += other.failed;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

fn combine(suite: &str, parts: Vec<CheckReport>) -> CheckReport {
    let mut report = CheckReport::new(suite);
    for part in parts {
        report.absorb(part);
    }
    report
}

/// Every list of length `min_len..=max_len` over `1..=max_term`.
pub fn term_grid(min_len: usize, max_len: usize, max_term: u64) -> impl Iterator<Item = Vec<u64>> {
    (min_len..=max_len).flat_map(move |len| {
        let total = max_term.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut xs = Vec::with_capacity(len);
            for _ in 0..len {
                xs.push(code % max_term + 1);
                code /= max_term;
            }
            xs
        })
    })
}

/// `K_n = K_m(x_1..x_m) K_{n-m}(x_{m+1}..x_n) + K_{m-1}(x_1..x_{m-1}) K_{n-m-1}(x_{m+2}..x_n)`
/// for one split point `1 <= m < n`.
pub fn splitting_holds<T: Natural>(xs: &[T], m: usize) -> bool {
    let n = xs.len();
    let whole = continuant(xs);
    let head = continuant(&xs[..m]) * continuant(&xs[m..]);
    let tail = continuant(&xs[..m - 1]) * continuant(&xs[(m + 1).min(n)..]);
    whole == head + tail
}

/// `K_n(x_1..x_n) K_{n-2}(x_2..x_{n-1}) - K_{n-1}(x_1..x_{n-1}) K_{n-1}(x_2..x_n) = (-1)^n`,
/// checked without leaving the naturals.
pub fn muir_holds<T: Natural>(xs: &[T]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let a = continuant(xs) * continuant(&xs[1..n - 1]);
    let b = continuant(&xs[..n - 1]) * continuant(&xs[1..]);
    if n % 2 == 0 {
        a == b + T::one()
    } else {
        b == a + T::one()
    }
}

/// `[x_1..x_n] = K_{n-1}(x_2..x_n) / K_n(x_1..x_n)` for positive terms.
pub fn continuant_ratio_holds<T: Natural>(xs: &[T]) -> bool {
    let terms = match ContinuedFraction::canonicalize(xs.to_vec()) {
        Ok(cf) => cf,
        Err(_) => return false,
    };
    let v = cf_value(&terms);
    let (num, den) = (continuant(&xs[1..]), continuant(xs));
    // the raw continuants are coprime, so they are the reduced value
    *v.numer() == num && *v.denom() == den
}

/// Continuant identities over a list family.
pub fn continuant_identities<T: Natural>(lists: impl IntoIterator<Item = Vec<T>>) -> CheckReport {
    let mut report = CheckReport::new("identities");
    for xs in lists {
        let show = |what: &str| format!("{what} fails for [{}]", join(&xs));
        report.check(muir_holds(&xs), || show("determinant identity"));
        for m in 1..xs.len() {
            report.check(splitting_holds(&xs, m), || {
                format!("{} at split m = {m}", show("splitting identity"))
            });
        }
        report.check(continuant_ratio_holds(&xs), || show("continuant ratio"));
    }
    report
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn fibonacci_upto(k: usize) -> Vec<u128> {
    let mut f = vec![0u128, 1];
    while f.len() <= k + 1 {
        let next = f[f.len() - 1].saturating_add(f[f.len() - 2]);
        f.push(next);
    }
    f
}

/// Path and continued-fraction structure of every interior fraction of `F_n`.
pub fn path_roundtrips<T: Natural>(n: &T) -> Result<CheckReport> {
    let farey = farey_sequence(n)?;
    let parts = farey[1..farey.len() - 1]
        .par_iter()
        .map(|x| roundtrip_one(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine("roundtrips", parts))
}

fn roundtrip_one<T: Natural>(x: &Ratio<T>) -> Result<CheckReport> {
    let mut report = CheckReport::new("roundtrips");
    let xs = ratio_string(x);
    let cf = cf_expand(x)?;
    report.check(cf_value(&cf) == *x, || format!("cf_value(cf_expand({xs})) != {xs}"));

    let path = symbolic_path(x)?;
    let mut expected = cf.terms().to_vec();
    let last = expected.pop().unwrap() - T::one();
    if !last.is_zero() {
        expected.push(last);
    }
    report.check(path.run_lengths() == expected, || {
        format!("path {path} of {xs} does not follow {cf}")
    });
    report.check(path.replay() == *x, || format!("replaying {path} misses {xs}"));
    report.check(path.len() + T::one() == cf.term_sum(), || {
        format!("level of {xs} is not {}", cf.term_sum())
    });

    let terms = cf.terms();
    report.check(continuant(terms) == *x.denom(), || {
        format!("K({cf}) is not the denominator of {xs}")
    });
    report.check(continuant(&terms[1..]) == *x.numer(), || {
        format!("K of the tail of {cf} is not the numerator of {xs}")
    });

    let conv = cf.convergents();
    let fib = fibonacci_upto(conv.len());
    for k in 1..=conv.len() {
        let (p, q) = (conv.p(k as isize), conv.q(k as isize));
        let (pp, qp) = (conv.p(k as isize - 1), conv.q(k as isize - 1));
        let cross_a = p.clone() * qp.clone();
        let cross_b = pp * q.clone();
        let unimodular = cross_a.clone() + T::one() == cross_b || cross_b + T::one() == cross_a;
        report.check(unimodular, || format!("convergents {k}-1, {k} of {xs} are not unimodular"));
        let grows = q.to_u128().map_or(true, |q| q >= fib[k + 1]);
        report.check(grows, || format!("q_{k} = {q} of {xs} is below Fib({})", k + 1));
    }
    Ok(report)
}

/// Interior fractions with `2 * numerator < denominator` (exactly `(0, 1/2)`).
fn below_half<T: Natural>(x: &Ratio<T>) -> bool {
    x.numer().clone() + x.numer().clone() < *x.denom()
}

/// Continued fraction route vs explicit graph vs interval route over `F_n`,
/// plus normalisation, mean degree and node/edge counts.
pub fn triple_equality<T: Natural>(n: &T) -> Result<CheckReport> {
    let farey = farey_sequence(n)?;
    let parts = farey
        .par_iter()
        .map(|x| triple_one(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine("triple", parts))
}

fn triple_one<T: Natural>(x: &Ratio<T>) -> Result<CheckReport> {
    let mut report = CheckReport::new("triple");
    let xs = ratio_string(x);
    let graph = build(x)?;
    let oracle = distribution_of(&graph);
    let thm1 = thm1_distribution(x)?;
    report.check(thm1 == oracle, || {
        format!("x = {xs}: thm1 {} != oracle {}", show_dist(&thm1), show_dist(&oracle))
    });

    let q = x.denom().clone();
    if x.numer().is_zero() || *x.numer() == q {
        report.check(thm1.is_empty(), || format!("x = {xs}: endpoint distribution not empty"));
        return Ok(report);
    }
    let max_k = thm1.max_degree().cloned().unwrap_or_else(T::zero);
    let mut k = T::from_u64_exact(5);
    while k <= max_k {
        let via_thm2 = thm2_eval(&k, x)?;
        let via_thm1 = thm1.get(&k);
        report.check(via_thm1 == via_thm2, || {
            format!(
                "x = {xs}, k = {k}: thm1 {} != thm2 {}",
                ratio_string(&via_thm1),
                ratio_string(&via_thm2)
            )
        });
        k = k + T::one();
    }

    report.check(thm1.total().is_one(), || format!("x = {xs}: probabilities sum to {}", ratio_string(&thm1.total())));
    let four_q_minus_two = q.clone() + q.clone() + q.clone() + q.clone() - T::one() - T::one();
    let mean = Ratio::new(four_q_minus_two, q.clone());
    report.check(thm1.mean_degree() == mean, || {
        format!("x = {xs}: mean degree {} != {}", ratio_string(&thm1.mean_degree()), ratio_string(&mean))
    });
    let q64 = q.to_u64().unwrap_or(u64::MAX);
    report.check(graph.node_count() as u64 == q64 + 1, || {
        format!("x = {xs}: {} nodes, expected {}", graph.node_count(), q64 + 1)
    });
    report.check(graph.edge_count() == 2 * q64 - 1, || {
        format!("x = {xs}: {} edges, expected {}", graph.edge_count(), 2 * q64 - 1)
    });
    Ok(report)
}

pub(crate) fn show_dist<T: Natural>(d: &DegreeDistribution<T>) -> String {
    let parts: Vec<String> = d
        .entries()
        .iter()
        .map(|(k, p)| format!("{k}: {}", ratio_string(p)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn counts_of<T: Natural>(x: &Ratio<T>) -> Result<BTreeMap<u64, u64>> {
    let g: HarosGraph<T> = build(x)?;
    Ok(match identify_boundary(&g) {
        Ok(ids) => ids.counts,
        Err(_) => BTreeMap::new(),
    })
}

/// `s^{(l,t)}`: the continuant of `[a_{l+1} - 1, a_{l+2}, ..., a_t]` for a
/// 1-based term list, with the empty list giving 1 and `t < l` giving 0.
fn truncation_denominator<T: Natural>(terms: &[T], l: usize, t: usize) -> T {
    if t < l {
        return T::zero();
    }
    if t == l {
        return T::one();
    }
    let mut list = terms[l..t].to_vec();
    list[0] = list[0].clone() - T::one();
    continuant(&list)
}

/// The node counts of each emergent degree along both descents from every
/// node of levels `3..=max_level` below one half.
///
/// For `x = [a_1..a_m]` the child `[a_1..a_m + 1]` continues the last run and
/// `[a_1..a_m - 1, 2]` turns; both are checked against the explicit graphs.
pub fn descent_recurrences<T: Natural>(max_level: usize) -> Result<CheckReport> {
    if max_level > MAX_TREE_LEVEL {
        return Err(HarosError::cap("tree level", max_level, MAX_TREE_LEVEL));
    }
    let mut parts = Vec::new();
    for level in 3..=max_level {
        let nodes = tree_level_nodes::<T>(level)?;
        let level_parts = nodes
            .par_iter()
            .filter(|node| below_half(&node.value))
            .map(|node| recurrence_one(&node.value))
            .collect::<Result<Vec<_>>>()?;
        parts.extend(level_parts);
    }
    Ok(combine("recurrences", parts))
}

fn recurrence_one<T: Natural>(x: &Ratio<T>) -> Result<CheckReport> {
    let mut report = CheckReport::new("recurrences");
    let xs = ratio_string(x);
    let cf = cf_expand(x)?;
    let a = cf.terms().to_vec();
    let m = a.len();
    let one = T::one();

    let mut extend_terms = a.clone();
    extend_terms[m - 1] = a[m - 1].clone() + one.clone();
    let extend = cf_value(&ContinuedFraction::new(extend_terms)?);

    let mut turn_terms = a.clone();
    turn_terms[m - 1] = a[m - 1].clone() - one.clone();
    let other_parent_terms = turn_terms.clone();
    turn_terms.push(T::from_u64_exact(2));
    let turn = cf_value(&ContinuedFraction::new(turn_terms)?);

    let (lower, upper) = tree_children(x)?;
    let pair_ok = (lower == extend && upper == turn) || (lower == turn && upper == extend);
    report.check(pair_ok, || format!("children of {xs} are not {{[..a_m+1], [..a_m-1, 2]}}"));
    // continuing the run moves away from 1/2 exactly when m is odd
    report.check((lower == extend) == (m % 2 == 1), || {
        format!("child order of {xs} contradicts the parity of m = {m}")
    });

    let convergent = cf.truncated(m - 1).map(|c| cf_value(&c)).unwrap_or_else(Ratio::zero);
    let other_parent = cf_value(&ContinuedFraction::canonicalize(other_parent_terms.clone())?);

    let c_x = counts_of(x)?;
    let c_conv = counts_of(&convergent)?;
    let c_other = counts_of(&other_parent)?;
    let c_ext = counts_of(&extend)?;
    let c_turn = counts_of(&turn)?;
    let get = |c: &BTreeMap<u64, u64>, k: u64| c.get(&k).copied().unwrap_or(0);
    let big = |v: T| v.to_u64().unwrap_or(u64::MAX);

    let mut prefix = 0u64;
    for l in 1..m {
        prefix += big(a[l - 1].clone());
        let k = prefix + 3;
        let ext = get(&c_ext, k);
        if l + 2 <= m {
            let formula = truncation_denominator(&a, l, m - 2)
                + (a[m - 1].clone() + one.clone()) * truncation_denominator(&a, l, m - 1);
            // same collision on this side when a_{m-1} = 1
            let collides = l == m - 2 && a[m - 2].is_one();
            report.check(collides || ext == get(&c_x, k) + get(&c_conv, k), || {
                format!("continuing from {xs}, k = {k}: {ext} != {} + {}", get(&c_x, k), get(&c_conv, k))
            });
            report.check(ext == big(formula.clone()), || {
                format!("continuing from {xs}, k = {k}: {ext} != recurrence value {formula}")
            });
        } else {
            report.check(ext == big(a[m - 1].clone()), || {
                format!("continuing from {xs}, k = {k}: {ext} != a_m = {}", a[m - 1])
            });
        }

        let turned = get(&c_turn, k);
        let formula = T::from_u64_exact(2) * truncation_denominator(&other_parent_terms, l, m)
            + truncation_denominator(&other_parent_terms, l, m - 1);
        report.check(turned == big(formula.clone()), || {
            format!("turning from {xs}, k = {k}: {turned} != recurrence value {formula}")
        });
        // with a_m = 2 the other parent re-canonicalises and its boundary
        // degree lands on k_{m-1}, so the sum relation only covers the rest
        let collides = l == m - 1 && a[m - 1] == T::from_u64_exact(2);
        report.check(collides || turned == get(&c_x, k) + get(&c_other, k), || {
            format!("turning from {xs}, k = {k}: {turned} != {} + {}", get(&c_x, k), get(&c_other, k))
        });
    }
    let boundary = big(cf.term_sum()) + 2;
    report.check(get(&c_turn, boundary) == 1, || {
        format!("turning from {xs}: degree {boundary} occurs {} times", get(&c_turn, boundary))
    });
    Ok(report)
}

type Signed = Ratio<BigInt>;

struct Piece {
    pivot: Signed,
    /// the child bounding this side
    end: Signed,
    /// peak value `1/b` at the pivot
    peak: Signed,
    points: Vec<(Signed, Signed)>,
}

fn on_line(a: &(Signed, Signed), b: &(Signed, Signed), at: &Signed) -> Signed {
    let slope = (b.1.clone() - a.1.clone()) / (b.0.clone() - a.0.clone());
    a.1.clone() + slope * (at.clone() - a.0.clone())
}

/// Shape of `x -> P(k, x)` over `F_n` for each `k` in `ks` (all `>= 5`),
/// using the continued-fraction route for the values:
///
/// * samples inside each open piece around a pivot of `ℓ_{k-3}` are collinear,
/// * the two pieces reach the same peak `1/b` at the pivot `a/b` and vanish at
///   the bounding children,
/// * everywhere else the value is zero unless `x` sits on level `k - 2` or
///   shallower.
pub fn corollary<T: Natural>(n: &T, ks: &[u64]) -> Result<CheckReport> {
    let farey = farey_sequence(n)?;
    let interior = &farey[1..farey.len() - 1];
    let dists = interior
        .par_iter()
        .map(|x| thm1_distribution(x))
        .collect::<Result<Vec<_>>>()?;
    let levels = interior
        .par_iter()
        .map(|x| cf_expand(x).map(|cf| cf.term_sum().to_u64().unwrap_or(u64::MAX)))
        .collect::<Result<Vec<_>>>()?;

    let mut report = CheckReport::new("corollary");
    for &k in ks {
        let pivots = tree_level_nodes::<T>(k as usize - 3)?;
        // pieces in increasing x order: (lower child, pivot), (pivot, upper child)
        let mut pieces: Vec<Piece> = Vec::with_capacity(2 * pivots.len());
        for node in &pivots {
            let (lo, hi) = node.children();
            let pivot = to_signed(&node.value);
            let peak = Signed::new(BigInt::one(), pivot.denom().clone());
            // both linear pieces, through the children, evaluated at the pivot
            let (lo_s, hi_s) = (to_signed(&lo), to_signed(&hi));
            let rise = pivot.clone() * lo_s.denom().clone() - lo_s.numer().clone();
            let fall = Signed::from_integer(hi_s.numer().clone()) - pivot.clone() * hi_s.denom().clone();
            report.check(rise == peak && fall == peak, || {
                format!("k = {k}: pieces at pivot {} do not meet at 1/{}", ratio_string(&node.value), node.value.denom())
            });
            for end in [lo, hi] {
                pieces.push(Piece {
                    pivot: pivot.clone(),
                    end: to_signed(&end),
                    peak: peak.clone(),
                    points: Vec::new(),
                });
            }
        }
        pieces.sort_by_key(|p| p.pivot.clone().min(p.end.clone()));

        let kt = T::from_u64_exact(k);
        for (i, x) in interior.iter().enumerate() {
            let xs = to_signed(x);
            let y = to_signed(&dists[i].get(&kt));
            // pieces are disjoint open intervals sorted by their left end
            let idx = pieces.partition_point(|p| p.pivot.clone().min(p.end.clone()) < xs);
            let inside = idx
                .checked_sub(1)
                .map(|j| &mut pieces[j])
                .filter(|p| xs < p.pivot.clone().max(p.end.clone()));
            match inside {
                Some(piece) => piece.points.push((xs, y)),
                None => {
                    let shallow = levels[i] <= k - 2;
                    report.check(shallow || y.is_zero(), || {
                        format!("k = {k}: P at {} is {} outside every piece", ratio_string(x), y)
                    });
                }
            }
        }

        for piece in &pieces {
            let pts = &piece.points;
            let describe = || {
                format!(
                    "k = {k}: piece between {} and {}",
                    piece.pivot.clone().min(piece.end.clone()),
                    piece.pivot.clone().max(piece.end.clone())
                )
            };
            match pts.len() {
                0 => {}
                1 => {
                    // a single sample still has to sit on the segment from 0 to the peak
                    let at = on_line(&(piece.end.clone(), Signed::zero()), &(piece.pivot.clone(), piece.peak.clone()), &pts[0].0);
                    report.check(at == pts[0].1, || format!("{}: lone sample off the segment", describe()));
                }
                _ => {
                    let (a, b) = (&pts[0], &pts[1]);
                    for p in &pts[2..] {
                        report.check(on_line(a, b, &p.0) == p.1, || {
                            format!("{}: sample at {} is not collinear", describe(), p.0)
                        });
                    }
                    report.check(on_line(a, b, &piece.pivot) == piece.peak, || {
                        format!("{}: does not reach the peak {} at the pivot", describe(), piece.peak)
                    });
                    report.check(on_line(a, b, &piece.end).is_zero(), || {
                        format!("{}: does not vanish at the child", describe())
                    });
                }
            }
        }
    }
    Ok(report)
}
