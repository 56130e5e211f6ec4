use haros::{
    build, cf_expand, cf_value, continuant, degree_distribution_oracle, symbolic_path,
    thm1_distribution, thm2_eval, thm2_eval_real, tree_children, ContinuedFraction, HarosError,
};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

// reduced p/q strictly inside (0, 1)
fn interior(max_q: u64) -> impl Strategy<Value = Ratio<u64>> {
    (2..=max_q)
        .prop_flat_map(|q| (1..q, Just(q)))
        .prop_filter("reduced", |(p, q)| p.gcd(q) == 1)
        .prop_map(|(p, q)| Ratio::new(p, q))
}

fn terms(max_len: usize, max_term: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max_term, 1..=max_len)
}

fn big(xs: &[u64]) -> Vec<BigUint> {
    xs.iter().map(|&x| BigUint::from(x)).collect()
}

proptest! {
    #[test]
    fn expansion_round_trips(x in interior(1_000_000)) {
        let cf = cf_expand(&x).unwrap();
        prop_assert_eq!(cf_value(&cf), x);
        prop_assert!(cf.len() == 1 || !cf.terms().last().unwrap().is_one());
        prop_assert_eq!(ContinuedFraction::new(cf.terms().to_vec()).unwrap(), cf);
    }

    #[test]
    fn trailing_one_folds_into_previous_term(xs in terms(10, 9)) {
        let canon = ContinuedFraction::canonicalize(xs.clone()).unwrap();
        let mut split = xs.clone();
        let tail = split.pop().unwrap();
        prop_assume!(tail > 1);
        split.push(tail - 1);
        split.push(1);
        prop_assert_eq!(ContinuedFraction::canonicalize(split).unwrap(), canon);
    }

    #[test]
    fn splitting_identity(xs in terms(10, 50), cut in any::<prop::sample::Index>()) {
        let xs = big(&xs);
        prop_assume!(xs.len() >= 2);
        let n = xs.len();
        let m = 1 + cut.index(n - 1);
        let rhs = continuant(&xs[..m]) * continuant(&xs[m..])
            + continuant(&xs[..m - 1]) * continuant(&xs[(m + 1).min(n)..]);
        prop_assert_eq!(continuant(&xs), rhs);
    }

    #[test]
    fn determinant_identity(xs in terms(10, 50)) {
        let xs = big(&xs);
        prop_assume!(xs.len() >= 2);
        let n = xs.len();
        let a = num_bigint::BigInt::from(continuant(&xs) * continuant(&xs[1..n - 1]));
        let b = num_bigint::BigInt::from(continuant(&xs[..n - 1]) * continuant(&xs[1..]));
        let sign = if n % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(a - b, num_bigint::BigInt::from(sign));
    }

    #[test]
    fn convergents_are_unimodular_and_grow(xs in terms(40, 6)) {
        let cf = ContinuedFraction::canonicalize(big(&xs)).unwrap();
        let c = cf.convergents();
        let (mut f0, mut f1) = (BigUint::from(1u8), BigUint::from(1u8));
        for k in 1..=c.len() as isize {
            let lhs = num_bigint::BigInt::from(c.p(k) * c.q(k - 1));
            let rhs = num_bigint::BigInt::from(c.p(k - 1) * c.q(k));
            prop_assert_eq!((lhs - rhs).magnitude().clone(), BigUint::one());
            // q_k >= Fib(k + 1)
            prop_assert!(c.q(k) >= f1);
            let next = f0.clone() + f1.clone();
            f0 = std::mem::replace(&mut f1, next);
        }
        prop_assert_eq!(c.last(), cf.value());
    }

    #[test]
    fn paths_replay(x in interior(1_000_000)) {
        let path = symbolic_path(&x).unwrap();
        prop_assert_eq!(path.replay(), x);
        prop_assert_eq!(path.len() + 1, cf_expand(&x).unwrap().term_sum());
        let (lo, hi) = tree_children(&x).unwrap();
        prop_assert!(lo < x && x < hi);
        prop_assert_eq!(lo.denom() + hi.denom(), 3 * x.denom());
    }

    #[test]
    fn mirror_symmetry(x in interior(400)) {
        let y = Ratio::from_integer(1) - x;
        prop_assert_eq!(thm1_distribution(&x).unwrap(), thm1_distribution(&y).unwrap());
        let mut reversed = build(&y).unwrap().degrees;
        reversed.reverse();
        prop_assert_eq!(build(&x).unwrap().degrees, reversed);
    }

    #[test]
    fn conservation(x in interior(5_000_000)) {
        let d = thm1_distribution(&x).unwrap();
        let q = *x.denom();
        prop_assert!(d.total().is_one());
        prop_assert_eq!(d.mean_degree(), Ratio::new(4 * q - 2, q));
    }

    #[test]
    fn support_structure(x in interior(1_000_000)) {
        let y = if x > Ratio::new(1, 2) { Ratio::from_integer(1) - x } else { x };
        let cf = cf_expand(&y).unwrap();
        let a = cf.terms();
        let mut expected: Vec<u64> = a
            .iter()
            .take(a.len() - 1)
            .scan(0, |acc, &t| { *acc += t; Some(*acc + 3) })
            .collect();
        expected.push(cf.term_sum() + 2);
        expected.retain(|&k| k >= 5);
        let d = thm1_distribution(&x).unwrap();
        let support: Vec<u64> = d.entries().keys().copied().filter(|&k| k >= 5).collect();
        prop_assert_eq!(support, expected);
    }

    #[test]
    fn routes_agree_on_random_fractions(x in interior(3_000)) {
        let d = thm1_distribution(&x).unwrap();
        prop_assert_eq!(&degree_distribution_oracle(&x).unwrap(), &d);
        for k in 5..=d.max_degree().copied().unwrap_or(4) {
            prop_assert_eq!(thm2_eval(&k, &x).unwrap(), d.get(&k));
        }
    }

    #[test]
    fn real_extension_tracks_exact_values(x in interior(100_000), k in 5u64..=9) {
        let exact = thm2_eval(&k, &x).unwrap().to_f64().unwrap();
        match thm2_eval_real(k, x.to_f64().unwrap()) {
            Ok(v) => prop_assert!((v - exact).abs() < 1e-12, "{} vs {}", v, exact),
            Err(HarosError::AmbiguousBreakpoint { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

fn generic_agreement(p: u64, q: u64) {
    let d64 = thm1_distribution(&Ratio::new(p, q)).unwrap();
    let d128 = thm1_distribution(&Ratio::new(p as u128, q as u128)).unwrap();
    let dbig = thm1_distribution(&Ratio::new(BigUint::from(p), BigUint::from(q))).unwrap();
    let as_pairs64: Vec<(u64, u64, u64)> = d64
        .entries()
        .iter()
        .map(|(k, v)| (*k, *v.numer(), *v.denom()))
        .collect();
    let as_pairs128: Vec<(u64, u64, u64)> = d128
        .entries()
        .iter()
        .map(|(k, v)| (*k as u64, *v.numer() as u64, *v.denom() as u64))
        .collect();
    let as_pairs_big: Vec<(u64, u64, u64)> = dbig
        .entries()
        .iter()
        .map(|(k, v)| (k.to_u64().unwrap(), v.numer().to_u64().unwrap(), v.denom().to_u64().unwrap()))
        .collect();
    assert_eq!(as_pairs64, as_pairs128);
    assert_eq!(as_pairs64, as_pairs_big);
}

#[test]
fn scalar_instantiations_agree() {
    for (p, q) in [(10, 23), (2, 5), (1, 2), (1, 3), (3, 8), (355, 1131), (99_991, 250_007)] {
        generic_agreement(p, q);
    }
}

#[test]
fn big_denominators_past_u64() {
    // consecutive Fibonacci ratio with a 120-digit denominator
    let mut ts = vec![BigUint::one(); 580];
    ts.push(BigUint::from(2u8));
    let x = ContinuedFraction::new(ts).unwrap().value();
    assert!(x.denom().bits() > 256);
    let d = thm1_distribution(&x).unwrap();
    assert!(d.total().is_one());
    assert_eq!(symbolic_path(&x).unwrap().replay(), x);
}
