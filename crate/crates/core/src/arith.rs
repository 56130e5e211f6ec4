//! Continued fractions, convergents and continuant polynomials over exact
//! rationals in the unit interval.
//!
//! A value `x` in `(0, 1]` is written `x = 1/(a_1 + 1/(a_2 + ...))`, i.e. the
//! integer part is always zero and omitted. Canonical term lists never end in
//! a `1`, except for `x = 1 = [1]`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{HarosError, Result};
use crate::scalar::{ratio_string, Natural};

/// Canonical continued-fraction expansion `[a_1, ..., a_m]` of a value in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction<T = num_bigint::BigUint> {
    terms: Vec<T>,
}

impl<T: Natural> ContinuedFraction<T> {
    /// Validates an already-canonical term list.
    pub fn new(terms: Vec<T>) -> Result<Self> {
        if terms.is_empty() {
            return Err(HarosError::InvalidTerms("empty term list".into()));
        }
        if terms.iter().any(Zero::is_zero) {
            return Err(HarosError::InvalidTerms(format!(
                "terms must be positive: {}",
                join_terms(&terms)
            )));
        }
        if terms.len() >= 2 && terms.last().is_some_and(One::is_one) {
            return Err(HarosError::InvalidTerms(format!(
                "trailing term 1 is not canonical: {}",
                join_terms(&terms)
            )));
        }
        Ok(ContinuedFraction { terms })
    }

    /// Accepts any positive term list and folds a trailing `1` into the
    /// previous term, so `[.., a, 1]` becomes `[.., a + 1]`.
    pub fn canonicalize(mut terms: Vec<T>) -> Result<Self> {
        if terms.len() >= 2 && terms.last().is_some_and(One::is_one) {
            terms.pop();
            if let Some(last) = terms.last_mut() {
                *last = last.clone() + T::one();
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<T> {
        self.terms
    }

    /// Number of terms `m`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `a_1 + ... + a_m`; this is also the index of the Farey-tree level
    /// holding the value.
    pub fn term_sum(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, a| acc + a.clone())
    }

    pub fn value(&self) -> Ratio<T> {
        cf_value(self)
    }

    pub fn convergents(&self) -> ConvergentList<T> {
        convergents(self)
    }

    /// The first `len` terms, re-canonicalised. `len == 0` is the empty
    /// expansion and yields `None` (its value is `0/1`).
    pub fn truncated(&self, len: usize) -> Option<Self> {
        if len == 0 {
            return None;
        }
        let terms = self.terms[..len.min(self.terms.len())].to_vec();
        Self::canonicalize(terms).ok()
    }
}

impl<T: fmt::Display> fmt::Display for ContinuedFraction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", join_terms(&self.terms))
    }
}

fn join_terms<T: fmt::Display>(terms: &[T]) -> String {
    terms
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Convergents `p_k/q_k`, `k = 1..m`, of a continued fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentList<T = num_bigint::BigUint> {
    numerators: Vec<T>,
    denominators: Vec<T>,
}

impl<T: Natural> ConvergentList<T> {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// `p_k` for `k` in `1..=m`, with the seeds `p_0 = 0` and `p_{-1} = 1`
    /// reachable through `k = 0` and `k = -1`.
    pub fn p(&self, k: isize) -> T {
        match k {
            -1 => T::one(),
            0 => T::zero(),
            k => self.numerators[k as usize - 1].clone(),
        }
    }

    /// `q_k`, seeded with `q_0 = 1` and `q_{-1} = 0`.
    pub fn q(&self, k: isize) -> T {
        match k {
            -1 => T::zero(),
            0 => T::one(),
            k => self.denominators[k as usize - 1].clone(),
        }
    }

    /// Convergent `k` (1-based) as a rational.
    pub fn get(&self, k: usize) -> Ratio<T> {
        Ratio::new_raw(
            self.numerators[k - 1].clone(),
            self.denominators[k - 1].clone(),
        )
    }

    pub fn entries(&self) -> Vec<Ratio<T>> {
        (1..=self.len()).map(|k| self.get(k)).collect()
    }

    pub fn last(&self) -> Ratio<T> {
        self.get(self.len())
    }
}

impl<T: Natural> fmt::Display for ConvergentList<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .numerators
            .iter()
            .zip(&self.denominators)
            .map(|(p, q)| format!("{p}/{q}"))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Expands `x` in `(0, 1]` into its canonical continued fraction.
pub fn cf_expand<T: Natural>(x: &Ratio<T>) -> Result<ContinuedFraction<T>> {
    if x.numer().is_zero() {
        return Err(HarosError::ZeroValue);
    }
    if x.numer() > x.denom() {
        return Err(HarosError::OutsideUnitInterval(ratio_string(x)));
    }
    // Euclid on q/p: each quotient is the next term.
    let mut terms = Vec::new();
    let (mut num, mut den) = (x.denom().clone(), x.numer().clone());
    while !den.is_zero() {
        let (quot, rem) = num.div_rem(&den);
        terms.push(quot);
        num = den;
        den = rem;
    }
    Ok(ContinuedFraction { terms })
}

/// Evaluates a continued fraction back to a reduced rational.
pub fn cf_value<T: Natural>(cf: &ContinuedFraction<T>) -> Ratio<T> {
    // Fold from the innermost term outwards: v <- 1 / (a + v).
    let (mut num, mut den) = (T::zero(), T::one());
    for a in cf.terms.iter().rev() {
        let next_den = a.clone() * den.clone() + num;
        num = den;
        den = next_den;
    }
    // numerator and denominator are consecutive continuants, hence coprime
    Ratio::new_raw(num, den)
}

/// Convergents by the three-term recurrence, seeded with
/// `p_{-1}/q_{-1} = 1/0` and `p_0/q_0 = 0/1`.
pub fn convergents<T: Natural>(cf: &ContinuedFraction<T>) -> ConvergentList<T> {
    let mut numerators = Vec::with_capacity(cf.len());
    let mut denominators = Vec::with_capacity(cf.len());
    let (mut p_prev2, mut p_prev1) = (T::one(), T::zero());
    let (mut q_prev2, mut q_prev1) = (T::zero(), T::one());
    for a in &cf.terms {
        let p = a.clone() * p_prev1.clone() + p_prev2;
        let q = a.clone() * q_prev1.clone() + q_prev2;
        p_prev2 = std::mem::replace(&mut p_prev1, p.clone());
        q_prev2 = std::mem::replace(&mut q_prev1, q.clone());
        numerators.push(p);
        denominators.push(q);
    }
    ConvergentList {
        numerators,
        denominators,
    }
}

/// Euler's continuant `K_n(x_1, ..., x_n)`, with `K_0 = 1`.
///
/// Terms may be zero; the recurrence is used as a polynomial identity.
pub fn continuant<T: Natural>(xs: &[T]) -> T {
    let (mut prev, mut cur) = (T::zero(), T::one());
    for x in xs {
        let next = x.clone() * cur.clone() + prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn r(p: u64, q: u64) -> Ratio<u64> {
        Ratio::new(p, q)
    }

    fn cf(terms: &[u64]) -> ContinuedFraction<u64> {
        ContinuedFraction::new(terms.to_vec()).unwrap()
    }

    #[test]
    fn expands_worked_examples() {
        assert_eq!(cf_expand(&r(10, 23)).unwrap().terms(), &[2, 3, 3]);
        assert_eq!(cf_expand(&r(1, 2)).unwrap().terms(), &[2]);
        assert_eq!(cf_expand(&r(3, 7)).unwrap().terms(), &[2, 3]);
        assert_eq!(cf_expand(&r(2, 5)).unwrap().terms(), &[2, 2]);
        assert_eq!(cf_expand(&r(1, 1)).unwrap().terms(), &[1]);
    }

    #[test]
    fn rejects_zero_and_values_above_one() {
        assert_eq!(cf_expand(&r(0, 1)), Err(HarosError::ZeroValue));
        assert!(matches!(
            cf_expand(&r(3, 2)),
            Err(HarosError::OutsideUnitInterval(_))
        ));
    }

    #[test]
    fn evaluates_terms() {
        assert_eq!(cf(&[2, 3, 3]).value(), r(10, 23));
        assert_eq!(cf(&[1]).value(), r(1, 1));
        assert_eq!(cf(&[2]).value(), r(1, 2));
    }

    #[test]
    fn convergent_examples() {
        assert_eq!(
            cf(&[2, 3, 3]).convergents().entries(),
            vec![r(1, 2), r(3, 7), r(10, 23)]
        );
        assert_eq!(cf(&[2]).convergents().entries(), vec![r(1, 2)]);
        assert_eq!(cf(&[2, 2]).convergents().entries(), vec![r(1, 2), r(2, 5)]);
    }

    #[test]
    fn convergent_seeds() {
        let c = cf(&[2, 3]).convergents();
        assert_eq!((c.p(-1), c.q(-1)), (1, 0));
        assert_eq!((c.p(0), c.q(0)), (0, 1));
        assert_eq!((c.p(2), c.q(2)), (3, 7));
    }

    #[test]
    fn continuant_examples() {
        assert_eq!(continuant::<u64>(&[]), 1);
        assert_eq!(continuant(&[5u64]), 5);
        assert_eq!(continuant(&[2u64, 3, 3]), 23);
        assert_eq!(continuant(&[2u64, 3]), 7);
    }

    #[test]
    fn rejects_non_canonical_terms() {
        assert!(ContinuedFraction::<u64>::new(vec![]).is_err());
        assert!(ContinuedFraction::new(vec![2u64, 0, 3]).is_err());
        assert!(ContinuedFraction::new(vec![2u64, 1]).is_err());
        assert_eq!(
            ContinuedFraction::canonicalize(vec![2u64, 1]).unwrap().terms(),
            &[3]
        );
        assert_eq!(ContinuedFraction::new(vec![1u64]).unwrap().terms(), &[1]);
    }

    #[test]
    fn truncation_recanonicalises() {
        let c = cf(&[2, 1, 2]);
        assert_eq!(c.truncated(2).unwrap().terms(), &[3]);
        assert_eq!(c.truncated(0), None);
    }

    #[test]
    fn big_integers_do_not_overflow() {
        // 99 ones then a two: denominators are Fibonacci numbers past u64
        let mut terms = vec![BigUint::from(1u8); 99];
        terms.push(BigUint::from(2u8));
        let c = ContinuedFraction::new(terms).unwrap();
        let v = c.value();
        assert!(v.denom().bits() > 64);
        assert_eq!(cf_expand(&v).unwrap(), c);
    }
}
