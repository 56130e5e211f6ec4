//! Explicit Haros-graph construction on degree sequences.
//!
//! A Haros graph is determined by its ordered degree sequence, so that is all
//! we store. The seed graph `G_0` is a single edge, `[1, 1]`. Concatenating two
//! neighbouring graphs merges the touching extreme nodes and joins the two new
//! extremes by an edge:
//!
//! ```text
//! [l_1, .., l_n] ⊕ [r_1, .., r_m] = [l_1 + 1, l_2, .., l_n + r_1, .., r_{m-1}, r_m + 1]
//! ```

use std::collections::BTreeMap;

use num_rational::Ratio;


use crate::dist::DegreeDistribution;
use crate::error::{HarosError, Result};
use crate::farey::{are_adjacent, mediant, symbolic_path, Direction};
use crate::scalar::{ratio_string, Natural};

/// Largest denominator [`build`] accepts by default.
pub const DEFAULT_BUILD_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarosGraph<T: Natural = num_bigint::BigUint> {
    pub label: Ratio<T>,
    /// Node degrees left to right; the extreme nodes come first and last.
    pub degrees: Vec<u64>,
}

impl<T: Natural> HarosGraph<T> {
    /// `G_0` carrying the label `0/1` or `1/1`.
    pub fn seed(label: Ratio<T>) -> Self {
        HarosGraph {
            label,
            degrees: vec![1, 1],
        }
    }

    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.degrees.iter().sum::<u64>() / 2
    }
}

/// Node-degree counts after merging the two extreme nodes into one boundary
/// node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentifiedDegreeMultiset {
    pub counts: BTreeMap<u64, u64>,
    pub total: u64,
    pub boundary_degree: u64,
}

impl IdentifiedDegreeMultiset {
    pub fn count(&self, degree: u64) -> u64 {
        self.counts.get(&degree).copied().unwrap_or(0)
    }
}

/// `left ⊕ right` for Farey-neighbouring labels `left < right`.
pub fn concat<T: Natural>(left: &HarosGraph<T>, right: &HarosGraph<T>) -> Result<HarosGraph<T>> {
    let label = mediant(&left.label, &right.label)?;
    let (l, r) = (&left.degrees, &right.degrees);
    let mut degrees = Vec::with_capacity(l.len() + r.len() - 1);
    degrees.extend_from_slice(l);
    degrees[0] += 1;
    *degrees.last_mut().unwrap() += r[0];
    degrees.extend_from_slice(&r[1..]);
    *degrees.last_mut().unwrap() += 1;
    Ok(HarosGraph { label, degrees })
}

/// Shared-structure form of a degree sequence used while descending the
/// tree: every step is O(1) and the sequence is flattened once at the end.
struct Rope {
    segs: Vec<Seg>,
}

#[derive(Clone, Copy)]
struct Seg {
    first: u64,
    last: u64,
    // `None` for the seed; otherwise the two concatenated operands
    join: Option<(usize, usize)>,
}

impl Rope {
    fn seed(&mut self) -> usize {
        self.segs.push(Seg {
            first: 1,
            last: 1,
            join: None,
        });
        self.segs.len() - 1
    }

    fn join(&mut self, left: usize, right: usize) -> usize {
        let seg = Seg {
            first: self.segs[left].first + 1,
            last: self.segs[right].last + 1,
            join: Some((left, right)),
        };
        self.segs.push(seg);
        self.segs.len() - 1
    }

    fn flatten(&self, root: usize, len_hint: usize) -> Vec<u64> {
        enum Work {
            Node(usize),
            Emit(u64),
        }
        let top = self.segs[root];
        let mut out = Vec::with_capacity(len_hint);
        out.push(top.first);
        // emit interior nodes: interior(L), L.last + R.first, interior(R)
        let mut stack = vec![Work::Node(root)];
        while let Some(work) = stack.pop() {
            match work {
                Work::Emit(d) => out.push(d),
                Work::Node(i) => {
                    if let Some((l, r)) = self.segs[i].join {
                        stack.push(Work::Node(r));
                        stack.push(Work::Emit(self.segs[l].last + self.segs[r].first));
                        stack.push(Work::Node(l));
                    }
                }
            }
        }
        out.push(top.last);
        out
    }
}

/// Builds `G_x` with the default size cap.
pub fn build<T: Natural>(x: &Ratio<T>) -> Result<HarosGraph<T>> {
    build_with_cap(x, DEFAULT_BUILD_CAP)
}

/// Builds `G_x` for `x` in `[0, 1]` by following the descent path of `x` and
/// concatenating with the neighbouring graphs at every step. Refuses
/// denominators above `max_q`.
pub fn build_with_cap<T: Natural>(x: &Ratio<T>, max_q: u64) -> Result<HarosGraph<T>> {
    if x.numer() > x.denom() {
        return Err(HarosError::OutsideUnitInterval(ratio_string(x)));
    }
    if x.numer().is_zero() || x.numer() == x.denom() {
        return Ok(HarosGraph::seed(x.clone()));
    }
    let q = match x.denom().to_u64() {
        Some(q) if q <= max_q => q,
        _ => return Err(HarosError::cap("denominator", x.denom(), max_q)),
    };

    let mut rope = Rope {
        segs: Vec::with_capacity(64),
    };
    let zero = rope.seed();
    let one = rope.seed();
    // the first L step reaches 1/2 = G_0 ⊕ G_0
    let (mut left, mut cur, mut right) = (zero, rope.join(zero, one), one);
    let mut first = true;
    for (dir, count) in symbolic_path(x)?.runs() {
        let mut steps = count.to_u64().expect("path run bounded by q");
        if first {
            steps -= 1;
            first = false;
        }
        for _ in 0..steps {
            match dir {
                Direction::L => {
                    let next = rope.join(left, cur);
                    right = cur;
                    cur = next;
                }
                Direction::R => {
                    let next = rope.join(cur, right);
                    left = cur;
                    cur = next;
                }
            }
        }
    }
    Ok(HarosGraph {
        label: x.clone(),
        degrees: rope.flatten(cur, q as usize + 1),
    })
}

/// Merges the two extreme nodes of `g` into a single boundary node.
pub fn identify_boundary<T: Natural>(g: &HarosGraph<T>) -> Result<IdentifiedDegreeMultiset> {
    let d = &g.degrees;
    if d.len() < 3 {
        return Err(HarosError::SeedGraph);
    }
    let boundary_degree = d[0] + d[d.len() - 1];
    let mut counts = BTreeMap::new();
    *counts.entry(boundary_degree).or_insert(0) += 1;
    for &k in &d[1..d.len() - 1] {
        *counts.entry(k).or_insert(0) += 1;
    }
    Ok(IdentifiedDegreeMultiset {
        counts,
        total: d.len() as u64 - 1,
        boundary_degree,
    })
}

/// Degree distribution read off the explicitly built graph.
pub fn degree_distribution_oracle<T: Natural>(x: &Ratio<T>) -> Result<DegreeDistribution<T>> {
    oracle_with_cap(x, DEFAULT_BUILD_CAP)
}

pub fn oracle_with_cap<T: Natural>(x: &Ratio<T>, max_q: u64) -> Result<DegreeDistribution<T>> {
    Ok(distribution_of(&build_with_cap(x, max_q)?))
}

/// Distribution of an already built graph; the seed graph has none.
pub fn distribution_of<T: Natural>(g: &HarosGraph<T>) -> DegreeDistribution<T> {
    let q = g.label.denom().clone();
    let ids = match identify_boundary(g) {
        Ok(ids) => ids,
        Err(_) => return DegreeDistribution::empty(q),
    };
    let entries = ids
        .counts
        .into_iter()
        .map(|(k, m)| (T::from_u64_exact(k), Ratio::new(T::from_u64_exact(m), q.clone())))
        .collect();
    DegreeDistribution::from_entries(entries, q)
}

/// Labels must be Farey neighbours, in order, for [`concat`] to apply.
pub fn can_concat<T: Natural>(left: &HarosGraph<T>, right: &HarosGraph<T>) -> bool {
    are_adjacent(&left.label, &right.label)
}
