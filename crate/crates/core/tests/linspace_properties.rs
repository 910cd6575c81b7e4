mod common;

use common::{all_descriptors, dyadic_to_q, to_q};
use hyperseries::binsplit::{exact_eval, exact_partial_sum};
use hyperseries::bigfix::bit_length;
use hyperseries::catalog::{exp_series, geometric_series, get_constant, zeta3_series};
use hyperseries::linspace::{
    evaluate_constant_with, evaluate_series_with, horner_eval_traced, horner_exact,
    internal_target,
};
use hyperseries::series::{plan_evaluation, BlockLayout};
use hyperseries::{evaluate_constant, evaluate_series, Algorithm, BigInt, EvalOptions, Rational};
use hyperseries_oracle::{abs_diff, certified_digits, pow2_neg};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn checked() -> EvalOptions {
    EvalOptions {
        assert_state_bound: true,
    }
}

#[test]
fn exact_horner_equals_full_range_sum() {
    for s in all_descriptors() {
        for r in 0..=64u64 {
            let layout = BlockLayout::for_terms(r);
            assert_eq!(
                horner_exact(&s, &layout).unwrap().reduced(),
                exact_partial_sum(&s, r).unwrap().reduced(),
                "{} r={r}",
                s.name
            );
        }
    }
}

#[test]
fn truncation_error_within_bound_on_random_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut tried = 0;
    while tried < 256 {
        let s = common::descriptor_from(&hyperseries_oracle::random::admissible(&mut rng), tried);
        let n = rng.gen_range(1..=128u64);
        let plan = plan_evaluation(&s, n).unwrap();
        let (h, _) = horner_eval_traced(&s, &plan, checked()).unwrap();
        let exact = exact_partial_sum(&s, plan.r).unwrap();
        let scaled_err = (&h.to_rational() - &exact).abs().shl(plan.m);
        let bound = Rational::from(BigInt::from(plan.m * plan.k1 * plan.k1) * &plan.w);
        assert!(
            scaled_err < bound,
            "{s:?} n={n}: error * 2^m = {scaled_err} not below {bound}"
        );
        tried += 1;
    }
}

#[test]
fn end_to_end_contract_against_exact_eval() {
    for s in all_descriptors() {
        let mut n = 8;
        while n <= 4096 {
            let got = evaluate_series_with(&s, n, checked()).unwrap().value;
            assert_eq!(got.frac_bits(), n);
            let reference = exact_eval(&s, n + 20).unwrap();
            // reference is within 2^-(n+19) of the true value
            let err = abs_diff(&dyadic_to_q(&got), &dyadic_to_q(&reference));
            assert!(err <= pow2_neg(n) - pow2_neg(n + 18), "{} n={n}", s.name);
            let classical = exact_eval(&s, n).unwrap();
            let gap = abs_diff(&dyadic_to_q(&got), &dyadic_to_q(&classical));
            assert!(gap <= pow2_neg(n - 1), "{} n={n}: disagrees with exact_eval", s.name);
            n *= 2;
        }
    }
}

#[test]
fn state_sizes_stay_linear_in_target() {
    for s in all_descriptors() {
        for n in [64, 512, 4096, 20000] {
            let e = evaluate_series_with(&s, n, checked()).unwrap();
            let p = &e.plan;
            let cap = BigInt::from((p.k1 + 1) * p.r1.max(1)) * &p.w;
            let limit = p.m + bit_length(&cap);
            assert!(
                e.stats.max_state_bits <= limit,
                "{} n={n}: {} bits > {limit}",
                s.name,
                e.stats.max_state_bits
            );
            assert!(e.stats.tau_bounded, "{} n={n}: some |tau*| > 1 + 2^-m", s.name);
            assert!(e.stats.state_bound_checked);
        }
    }
}

#[test]
fn internal_plan_targets_two_extra_bits() {
    let e = evaluate_series_with(&geometric_series(), 100, EvalOptions::default()).unwrap();
    assert_eq!(e.plan.n, 102);
    assert_eq!(e.plan, plan_evaluation(&geometric_series(), internal_target(&geometric_series(), 100)).unwrap());
}

#[test]
fn evaluate_series_examples() {
    let g = evaluate_series(&geometric_series(), 64).unwrap();
    let half = hyperseries_oracle::malachite_q::Rational::from_signeds(1, 2);
    assert!(abs_diff(&dyadic_to_q(&g), &half) <= pow2_neg(64));

    let e = evaluate_series(&exp_series(), 64).unwrap();
    let oracle = hyperseries_oracle::e(30);
    assert!(abs_diff(&dyadic_to_q(&e), &oracle.value) <= pow2_neg(64) + &oracle.tail_bound);

    let z = evaluate_series(&zeta3_series(), 32).unwrap();
    let oracle = hyperseries_oracle::zeta3(20);
    assert!(abs_diff(&dyadic_to_q(&z), &oracle.value) <= pow2_neg(32) + &oracle.tail_bound);
    assert!(z.render_digits(10, 7).unwrap().starts_with("1.202056"));
}

#[test]
fn pi_combination() {
    let pi = get_constant("pi").unwrap();
    let e = evaluate_constant_with(&pi, 16, Algorithm::Linspace, checked()).unwrap();
    assert_eq!(e.guard_bits, 6);
    assert!(e.series.iter().all(|r| r.bits == 22));
    let oracle = hyperseries_oracle::pi(20);
    assert!(abs_diff(&dyadic_to_q(&e.value), &oracle.value) <= pow2_neg(16) + &oracle.tail_bound);
    assert!(e.value.render_digits(10, 4).unwrap().starts_with("3.141"));

    let v = evaluate_constant(&pi, 64).unwrap();
    assert_eq!(v.render_digits(2, 16).unwrap(), "11.0010010000111111");
    assert!(abs_diff(&dyadic_to_q(&v), &oracle.value) <= pow2_neg(64) + &oracle.tail_bound);
    assert_eq!(certified_digits(&oracle, 18), v.render_digits(10, 18).unwrap());
}

#[test]
fn single_unit_coefficient_matches_series() {
    for s in all_descriptors() {
        let f = hyperseries::ConstantFormula::single(s.clone());
        assert_eq!(evaluate_constant(&f, 200).unwrap(), evaluate_series(&s, 200).unwrap());
    }
}

#[test]
fn classical_and_linspace_agree_on_constants() {
    for name in ["e", "pi", "zeta3"] {
        let f = get_constant(name).unwrap();
        for n in [64, 1000] {
            let l = evaluate_constant_with(&f, n, Algorithm::Linspace, checked()).unwrap();
            let c = evaluate_constant_with(&f, n, Algorithm::Classical, checked()).unwrap();
            let gap = abs_diff(&dyadic_to_q(&l.value), &dyadic_to_q(&c.value));
            assert!(gap <= pow2_neg(n - 1), "{name} n={n}");
        }
    }
}

#[test]
fn exact_horner_uses_plan_blocks() {
    // the layout used by a real plan reassembles the same sum
    let s = zeta3_series();
    let plan = plan_evaluation(&s, 300).unwrap();
    assert_eq!(
        to_q(&horner_exact(&s, &plan.layout()).unwrap()),
        to_q(&exact_partial_sum(&s, plan.r).unwrap())
    );
}
