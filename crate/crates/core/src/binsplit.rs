//! Classical binary splitting.
//!
//! For an index range `[i1, i2]` the engine builds the exact quadruple
//!
//! ```text
//! P = p(i1)..p(i2)   Q = q(i1)..q(i2)   B = b(i1)..b(i2)   T = B Q S(i1, i2)
//! ```
//!
//! where `S(i1, i2) = sum_{i=i1..i2} a(i) p(i1)..p(i) / (b(i) q(i1)..q(i))`.
//! Halves are combined as `T = B_r Q_r T_l + B_l P_l T_r`. No gcd reduction
//! happens during recursion.
//!
//! [`exact_eval`] runs the recursion over the full range `0..=r` and divides
//! once at the end. Its peak storage is the full-length `T(0, r)`, which is
//! the baseline the linear-space evaluator is measured against.

use crate::bigfix::{rational_to_dyadic, BigInt, Dyadic, Rational};
use crate::error::Result;
use crate::series::{check_conditions, prefactor_guard_bits, terms_needed, SeriesDescriptor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pqbt {
    pub p: BigInt,
    pub q: BigInt,
    pub b: BigInt,
    pub t: BigInt,
}

impl Pqbt {
    fn leaf(s: &SeriesDescriptor, i: u64) -> Result<Self> {
        let p = s.p.eval(i);
        let q = s.q_nonzero(i)?;
        let b = s.b_nonzero(i)?;
        let t = s.a.eval(i) * &p;
        Ok(Self { p, q, b, t })
    }

    /// Join the quadruple of `[i1, k]` (self) with that of `[k+1, i2]`.
    pub fn combine(self, right: Pqbt) -> Pqbt {
        let t = BigInt::from(&right.b * &right.q) * self.t + BigInt::from(&self.b * &self.p) * right.t;
        Pqbt {
            p: self.p * right.p,
            q: self.q * right.q,
            b: self.b * right.b,
            t,
        }
    }

    /// The exact range sum `T / (B Q)`.
    pub fn sum(&self) -> Rational {
        Rational::new(self.t.clone(), BigInt::from(&self.b * &self.q)).expect("B and Q are nonzero")
    }

    /// Consume into `T / (B Q)` without cloning `T`.
    pub fn into_sum(self) -> Rational {
        Rational::new(self.t, self.b * self.q).expect("B and Q are nonzero")
    }
}

/// Exact `(P, Q, B, T)` over `[i1, i2]`, split at the midpoint.
pub fn split_sum(s: &SeriesDescriptor, i1: u64, i2: u64) -> Result<Pqbt> {
    assert!(i1 <= i2, "empty range {i1}..={i2}");
    if i1 == i2 {
        return Pqbt::leaf(s, i1);
    }
    let mid = i1 + (i2 - i1) / 2;
    let left = split_sum(s, i1, mid)?;
    let right = split_sum(s, mid + 1, i2)?;
    Ok(left.combine(right))
}

/// `(p(j1)..p(j2), q(j1)..q(j2))` by balanced splitting.
pub fn split_product(s: &SeriesDescriptor, j1: u64, j2: u64) -> Result<(BigInt, BigInt)> {
    assert!(j1 <= j2, "empty range {j1}..={j2}");
    if j1 == j2 {
        return Ok((s.p.eval(j1), s.q_nonzero(j1)?));
    }
    let mid = j1 + (j2 - j1) / 2;
    let (pl, ql) = split_product(s, j1, mid)?;
    let (pr, qr) = split_product(s, mid + 1, j2)?;
    Ok((pl * pr, ql * qr))
}

/// Result of a full-range classical evaluation.
#[derive(Clone, Debug)]
pub struct ClassicalRun {
    pub value: Dyadic,
    /// Last term index summed.
    pub r: u64,
}

/// `prefactor * S` to `n + 2` fractional bits, within
/// `2^-(n+1) + 2^-(n+2)` of the true value.
pub fn exact_eval(s: &SeriesDescriptor, n: u64) -> Result<Dyadic> {
    exact_eval_run(s, n).map(|run| run.value)
}

pub fn exact_eval_run(s: &SeriesDescriptor, n: u64) -> Result<ClassicalRun> {
    // the tail must be small enough after scaling by the prefactor
    let r = terms_needed(s, n + 1 + prefactor_guard_bits(&s.prefactor));
    check_conditions(s, r)?;
    let total = split_sum(s, 0, r)?;
    let scaled = &s.prefactor * &total.into_sum();
    Ok(ClassicalRun {
        value: rational_to_dyadic(&scaled, n + 2),
        r,
    })
}

/// Classical counterpart of the linear-space evaluator: `prefactor * S`
/// rounded to exactly `n` fractional bits, error at most `2^-n`.
pub fn classical_series(s: &SeriesDescriptor, n: u64) -> Result<ClassicalRun> {
    let run = exact_eval_run(s, n + 1)?;
    Ok(ClassicalRun {
        value: run.value.round_output(n),
        r: run.r,
    })
}

/// Exact partial sum `S(r)` (no prefactor).
pub fn exact_partial_sum(s: &SeriesDescriptor, r: u64) -> Result<Rational> {
    Ok(split_sum(s, 0, r)?.into_sum())
}

/// Exact `prod_{j=j1..j2} p(j)/q(j)`.
pub fn exact_product(s: &SeriesDescriptor, j1: u64, j2: u64) -> Result<Rational> {
    let (p, q) = split_product(s, j1, j2)?;
    Ok(Rational::new(p, q).expect("Q is nonzero"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Polynomial, TailModel};

    fn geometric() -> SeriesDescriptor {
        SeriesDescriptor {
            name: "geometric".into(),
            a: Polynomial::constant(1),
            b: Polynomial::constant(2),
            p: Polynomial::constant(1),
            q: Polynomial::constant(2),
            tail: TailModel::new(Rational::one(), 0).unwrap(),
            prefactor: Rational::one(),
        }
    }

    fn exp_series() -> SeriesDescriptor {
        SeriesDescriptor {
            name: "exp".into(),
            a: Polynomial::constant(1),
            b: Polynomial::constant(2),
            p: Polynomial::constant(1),
            q: Polynomial::from_i64s(&[0, 1]).with_override(0, BigInt::from(1)),
            tail: TailModel::new(Rational::from_i64s(1, 4).unwrap(), 6).unwrap(),
            prefactor: Rational::from(2),
        }
    }

    fn pqbt(p: i64, q: i64, b: i64, t: i64) -> Pqbt {
        Pqbt {
            p: p.into(),
            q: q.into(),
            b: b.into(),
            t: t.into(),
        }
    }

    #[test]
    fn split_sum_examples() {
        let g = geometric();
        assert_eq!(split_sum(&g, 0, 0).unwrap(), pqbt(1, 2, 2, 1));
        let r = split_sum(&g, 0, 1).unwrap();
        assert_eq!(r, pqbt(1, 4, 4, 6));
        assert_eq!(r.sum(), Rational::from_i64s(3, 8).unwrap());

        let e = split_sum(&exp_series(), 0, 2).unwrap();
        assert_eq!((e.q.clone(), e.b.clone(), e.t.clone()), (2.into(), 8.into(), 20.into()));
        assert_eq!(e.sum(), Rational::from_i64s(5, 4).unwrap());
    }

    #[test]
    fn split_product_examples() {
        assert_eq!(split_product(&geometric(), 0, 3).unwrap(), (1.into(), 16.into()));
    }

    #[test]
    fn zero_q_is_a_descriptor_error() {
        let mut g = geometric();
        g.q = Polynomial::from_i64s(&[0, 1]);
        assert!(split_sum(&g, 0, 3).is_err());
        assert!(split_product(&g, 0, 3).is_err());
        assert!(split_product(&g, 1, 3).is_ok());
    }

    #[test]
    fn exact_eval_geometric() {
        let d = exact_eval(&geometric(), 10).unwrap();
        assert_eq!(d.frac_bits(), 12);
        let err = (&d.to_rational() - &Rational::from_i64s(1, 2).unwrap()).abs();
        assert!(err <= Rational::from_i64s(1, 1024).unwrap());
    }

    #[test]
    fn exact_eval_single_term() {
        let mut g = geometric();
        g.tail = TailModel::new(Rational::zero(), 0).unwrap();
        // r = 0: a(0) p(0) / (b(0) q(0)) = 1/4
        let d = exact_eval(&g, 5).unwrap();
        assert_eq!(d, Dyadic::new(1.into(), 2));
    }
}
