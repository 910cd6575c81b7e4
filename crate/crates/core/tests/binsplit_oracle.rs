mod common;

use common::{all_descriptors, dyadic_to_q, oracle_product, oracle_sum, to_q};
use hyperseries::binsplit::{exact_eval, split_product, split_sum};
use hyperseries::catalog::{arctan_series, exp_series, geometric_series, zeta3_series};
use hyperseries::BigInt;
use hyperseries_oracle::{abs_diff, pow2_neg};
use proptest::prelude::*;

#[test]
fn split_sum_matches_term_by_term_sum() {
    for s in all_descriptors() {
        for i1 in 0..=12u64 {
            for i2 in i1..=12u64 {
                let got = to_q(&split_sum(&s, i1, i2).unwrap().sum());
                assert_eq!(got, oracle_sum(&s, i1, i2), "{} [{i1}, {i2}]", s.name);
            }
        }
    }
}

#[test]
fn split_product_matches_brute_force() {
    for s in all_descriptors() {
        for j1 in 0..=20u64 {
            for j2 in j1..(j1 + 20) {
                let (p, q) = split_product(&s, j1, j2).unwrap();
                let got = hyperseries_oracle::rational_from_parts(&p.to_string(), &q.to_string());
                assert_eq!(got, oracle_product(&s, j1, j2), "{} [{j1}, {j2}]", s.name);
            }
        }
    }
}

#[test]
fn split_product_examples() {
    let (p, q) = split_product(&arctan_series(5), 1, 3).unwrap();
    assert_eq!((p, q), (BigInt::from(-1), BigInt::from(15625)));
    let (p, q) = split_product(&zeta3_series(), 1, 2).unwrap();
    assert_eq!((p, q), (BigInt::from(32), BigInt::from(777_600_000)));
}

#[test]
fn exact_eval_e_32_bits() {
    let got = exact_eval(&exp_series(), 32).unwrap();
    let e = hyperseries_oracle::e(20);
    // within 2^-(n+1) + 2^-(n+2) of e, plus the oracle's own tail
    let err = abs_diff(&dyadic_to_q(&got), &e.value);
    assert!(err <= pow2_neg(33) + pow2_neg(34) + e.tail_bound);
    assert_eq!(got.render_digits(10, 9).unwrap(), "2.718281828");
}

#[test]
fn exact_eval_geometric_is_half() {
    let got = exact_eval(&geometric_series(), 10).unwrap();
    let half = hyperseries_oracle::malachite_q::Rational::from_signeds(1, 2);
    assert!(abs_diff(&dyadic_to_q(&got), &half) <= pow2_neg(10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_point_does_not_matter(which in 0usize..6, i1 in 0u64..40, len in 1u64..40, cut in 0u64..1000) {
        let s = &all_descriptors()[which];
        let i2 = i1 + len;
        let k = i1 + cut % len; // i1 <= k < i2
        let joined = split_sum(s, i1, k).unwrap().combine(split_sum(s, k + 1, i2).unwrap());
        prop_assert_eq!(joined.sum(), split_sum(s, i1, i2).unwrap().sum());
    }
}
