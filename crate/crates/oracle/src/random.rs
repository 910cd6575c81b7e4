//! Random admissible series for property tests.

use rand::Rng;

/// Plain coefficient lists (lowest degree first) and a tail model
/// `ceil(alpha_num / alpha_den * k) + beta`.
#[derive(Clone, Debug)]
pub struct RandomSeries {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    pub alpha: (i64, i64),
    pub beta: u64,
}

fn poly(rng: &mut impl Rng, lo: i64, hi: i64, constant_lo: i64) -> Vec<i64> {
    let degree = rng.gen_range(0..=2);
    let mut c: Vec<i64> = (0..=degree).map(|_| rng.gen_range(lo..=hi)).collect();
    c[0] = rng.gen_range(constant_lo..=hi);
    c
}

/// Degree <= 2 and coefficients of magnitude <= 10, with `b(i) >= 2` and
/// `|p(j)| <= q(j)` for every index by construction: `b` and `q` have
/// nonnegative coefficients (constant term >= 2, resp. >= 1) and
/// `|p_k| <= q_k` termwise.
pub fn admissible(rng: &mut impl Rng) -> RandomSeries {
    let a = poly(rng, -10, 10, -10);
    let b = poly(rng, 0, 10, 2);
    let q = poly(rng, 0, 10, 1);
    let p = q
        .iter()
        .map(|&c| {
            let v = rng.gen_range(0..=c);
            if rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect();
    let alphas = [(1, 4), (1, 2), (1, 1), (3, 2), (2, 1)];
    RandomSeries {
        a,
        b,
        p,
        q,
        alpha: alphas[rng.gen_range(0..alphas.len())],
        beta: rng.gen_range(0..4),
    }
}

pub fn eval(coeffs: &[i64], i: u64) -> i128 {
    coeffs.iter().rev().fold(0i128, |acc, &c| acc * i as i128 + c as i128)
}
