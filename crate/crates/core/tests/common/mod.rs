#![allow(dead_code)]

use hyperseries::series::{Polynomial, SeriesDescriptor, TailModel};
use hyperseries_oracle::random::RandomSeries;
use hyperseries::{BigInt, Dyadic, Rational};
use hyperseries_oracle::malachite_nz::integer::Integer as QInteger;
use hyperseries_oracle::malachite_q::Rational as QRational;

/// Crosses between the two big-integer libraries through decimal text.
pub fn to_oracle_int(x: &BigInt) -> QInteger {
    x.to_string().parse().expect("decimal integer")
}

pub fn to_q(x: &Rational) -> QRational {
    hyperseries_oracle::rational_from_parts(&x.num().to_string(), &x.den().to_string())
}

pub fn dyadic_to_q(d: &Dyadic) -> QRational {
    to_q(&d.to_rational())
}

/// Term-by-term sum of `s` over `[i1, i2]` with products starting at `i1`.
pub fn oracle_sum(s: &SeriesDescriptor, i1: u64, i2: u64) -> QRational {
    hyperseries_oracle::range_sum(
        |i| to_oracle_int(&s.a.eval(i)),
        |i| to_oracle_int(&s.b.eval(i)),
        |i| to_oracle_int(&s.p.eval(i)),
        |i| to_oracle_int(&s.q.eval(i)),
        i1,
        i2,
    )
}

pub fn oracle_product(s: &SeriesDescriptor, j1: u64, j2: u64) -> QRational {
    hyperseries_oracle::range_product(
        |j| to_oracle_int(&s.p.eval(j)),
        |j| to_oracle_int(&s.q.eval(j)),
        j1,
        j2,
    )
}

/// Every descriptor with a bundled or closed-form role.
pub fn all_descriptors() -> Vec<SeriesDescriptor> {
    let mut v = hyperseries::catalog::bundled_series();
    v.push(hyperseries::catalog::zeta3_uncorrected_series());
    v.push(hyperseries::catalog::geometric_series());
    v
}

pub fn descriptor_from(r: &RandomSeries, id: usize) -> SeriesDescriptor {
    SeriesDescriptor {
        name: format!("random-{id}"),
        a: Polynomial::from_i64s(&r.a),
        b: Polynomial::from_i64s(&r.b),
        p: Polynomial::from_i64s(&r.p),
        q: Polynomial::from_i64s(&r.q),
        tail: TailModel::new(Rational::from_i64s(r.alpha.0, r.alpha.1).unwrap(), r.beta).unwrap(),
        prefactor: Rational::one(),
    }
}
