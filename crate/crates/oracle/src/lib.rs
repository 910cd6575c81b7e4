//! Reference computations for tests.
//!
//! Everything here sums terms one at a time in reduced rational arithmetic
//! (`malachite-q`), from closed forms or plain closures. None of it shares
//! code with the evaluators under test.

use malachite_base::num::arithmetic::traits::{Abs, Floor, Pow};
use malachite_base::num::basic::traits::{One, Zero};
use malachite_nz::integer::Integer;
use malachite_nz::natural::Natural;
use malachite_q::Rational;

pub mod random;

pub use malachite_nz;
pub use malachite_q;

/// `sum_{i=i1..=i2} a(i)/b(i) * prod_{j=i1..=i} p(j)/q(j)`, term by term.
pub fn range_sum(
    a: impl Fn(u64) -> Integer,
    b: impl Fn(u64) -> Integer,
    p: impl Fn(u64) -> Integer,
    q: impl Fn(u64) -> Integer,
    i1: u64,
    i2: u64,
) -> Rational {
    let mut sum = Rational::ZERO;
    let mut prod = Rational::ONE;
    for i in i1..=i2 {
        prod *= Rational::from_integers(p(i), q(i));
        sum += Rational::from_integers(a(i), b(i)) * &prod;
    }
    sum
}

/// `prod_{j=j1..=j2} p(j)/q(j)`, factor by factor.
pub fn range_product(
    p: impl Fn(u64) -> Integer,
    q: impl Fn(u64) -> Integer,
    j1: u64,
    j2: u64,
) -> Rational {
    let mut prod = Rational::ONE;
    for j in j1..=j2 {
        prod *= Rational::from_integers(p(j), q(j));
    }
    prod
}

/// Converged value with a rigorous bound on the omitted tail.
pub struct Enclosure {
    pub value: Rational,
    pub tail_bound: Rational,
}

fn pow10(k: u64) -> Natural {
    Natural::from(10u32).pow(k)
}

/// Stop once the bound drops below `10^-(digits + 20)`.
fn tiny(digits: u64) -> Rational {
    Rational::from_naturals(Natural::ONE, pow10(digits + 20))
}

/// `e = sum 1/i!`. The tail after term `i` is below `2 / (i+1)!`.
pub fn e(digits: u64) -> Enclosure {
    let mut sum = Rational::ZERO;
    let mut term = Rational::ONE;
    let mut i = 0u64;
    loop {
        sum += &term;
        i += 1;
        term /= Rational::from(i);
        if term < tiny(digits) {
            return Enclosure {
                value: sum,
                tail_bound: term * Rational::from(2u32),
            };
        }
    }
}

/// `arctan(1/x) = sum (-1)^i / ((2i+1) x^(2i+1))`; alternating with
/// decreasing terms, so the tail is below the first omitted term.
pub fn arctan_inv(x: u64, digits: u64) -> Enclosure {
    let mut sum = Rational::ZERO;
    let mut i = 0u64;
    loop {
        let den = Natural::from(2 * i + 1) * Natural::from(x).pow(2 * i + 1);
        let term = Rational::from_naturals(Natural::ONE, den);
        if term < tiny(digits) {
            return Enclosure {
                value: sum,
                tail_bound: term,
            };
        }
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        i += 1;
    }
}

/// Machin: `pi = 16 arctan(1/5) - 4 arctan(1/239)`.
pub fn pi(digits: u64) -> Enclosure {
    let a = arctan_inv(5, digits + 2);
    let b = arctan_inv(239, digits + 2);
    Enclosure {
        value: Rational::from(16u32) * a.value - Rational::from(4u32) * b.value,
        tail_bound: Rational::from(16u32) * a.tail_bound + Rational::from(4u32) * b.tail_bound,
    }
}

fn factorial(n: u64) -> Natural {
    (1..=n).fold(Natural::ONE, |acc, k| acc * Natural::from(k))
}

/// `zeta(3) = sum (-1)^i (205 i^2 + 250 i + 77) ((i+1)!)^5 (i!)^5 / (2 ((2i+2)!)^5)`,
/// each term built from its factorials. Alternating and decreasing.
pub fn zeta3(digits: u64) -> Enclosure {
    let mut sum = Rational::ZERO;
    let mut i = 0u64;
    loop {
        let poly = Natural::from(205 * i * i + 250 * i + 77);
        let num = poly * factorial(i + 1).pow(5) * factorial(i).pow(5);
        let den = Natural::from(2u32) * factorial(2 * i + 2).pow(5);
        let term = Rational::from_naturals(num, den);
        if term < tiny(digits) {
            return Enclosure {
                value: sum,
                tail_bound: term,
            };
        }
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        i += 1;
    }
}

/// "int.ddd" with exactly `count` truncated decimals of a nonnegative rational.
pub fn truncated_decimal(x: &Rational, count: u64) -> String {
    assert!(*x >= 0u32, "nonnegative values only");
    let scaled: Integer = (x * Rational::from(pow10(count))).floor();
    let s = scaled.to_string();
    let s = format!("{s:0>width$}", width = count as usize + 1);
    let (int, frac) = s.split_at(s.len() - count as usize);
    if count == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    }
}

/// Decimal digits of the enclosed value, asserting the tail cannot change them.
pub fn certified_digits(enc: &Enclosure, count: u64) -> String {
    let lo = truncated_decimal(&(&enc.value - &enc.tail_bound), count);
    let hi = truncated_decimal(&(&enc.value + &enc.tail_bound), count);
    assert_eq!(lo, hi, "tail bound straddles a digit boundary");
    lo
}

/// `|x - y|`.
pub fn abs_diff(x: &Rational, y: &Rational) -> Rational {
    (x - y).abs()
}

/// `2^-k`.
pub fn pow2_neg(k: u64) -> Rational {
    Rational::from_naturals(Natural::ONE, Natural::ONE << k)
}

/// Convert from a decimal numerator/denominator pair (as produced by the
/// crate under test's `Display`) without going through its arithmetic.
pub fn rational_from_parts(num: &str, den: &str) -> Rational {
    let n: Integer = num.parse().expect("integer numerator");
    let d: Integer = den.parse().expect("integer denominator");
    Rational::from_integers(n, d)
}
