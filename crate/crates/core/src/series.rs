//! Series descriptors and evaluation planning.
//!
//! A descriptor represents
//!
//! ```text
//! S = sum_{i>=0} a(i)/b(i) * prod_{j=0..i} p(j)/q(j)
//! ```
//!
//! with integer polynomials `a`, `b`, `p`, `q`, a tail model `mu(k)` giving
//! the last index needed for accuracy `2^-k`, and a rational prefactor (the
//! represented value is `prefactor * S`).

use std::cmp::Ordering;
use std::fmt;


use crate::bigfix::{abs, bit_length, BigInt, Rational};
use crate::error::{Error, Result};

/// Integer polynomial in ascending-degree form, with per-index overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
    overrides: Vec<(u64, BigInt)>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Descriptor("polynomial needs at least one coefficient".into()));
        }
        Ok(Self {
            coeffs,
            overrides: Vec::new(),
        })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
            .expect("nonempty coefficient list")
    }

    pub fn constant(c: i64) -> Self {
        Self::from_i64s(&[c])
    }

    /// Replace the value at index `i`. A later override of the same index wins.
    pub fn with_override(mut self, index: u64, value: BigInt) -> Self {
        self.overrides.retain(|(i, _)| *i != index);
        self.overrides.push((index, value));
        self.overrides.sort_by_key(|(i, _)| *i);
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn overrides(&self) -> &[(u64, BigInt)] {
        &self.overrides
    }

    pub fn eval(&self, i: u64) -> BigInt {
        if let Some((_, v)) = self.overrides.iter().find(|(k, _)| *k == i) {
            return v.clone();
        }
        let x = BigInt::from(i);
        let mut acc = BigInt::new();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }
}

pub fn poly_eval(p: &Polynomial, i: u64) -> BigInt {
    p.eval(i)
}

/// `mu(k) = ceil(alpha * k) + beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailModel {
    alpha: Rational,
    beta: u64,
}

impl TailModel {
    pub fn new(alpha: Rational, beta: u64) -> Result<Self> {
        if alpha.signum() == Ordering::Less {
            return Err(Error::Descriptor(format!("tail alpha must be >= 0, got {alpha}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    /// Last term index needed for accuracy `2^-k`.
    pub fn terms(&self, k: u64) -> u64 {
        let scaled = &self.alpha * &Rational::from(BigInt::from(k));
        let c = u64::try_from(&scaled.ceil()).expect("term count fits in u64");
        c + self.beta
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesDescriptor {
    pub name: String,
    pub a: Polynomial,
    pub b: Polynomial,
    pub p: Polynomial,
    pub q: Polynomial,
    pub tail: TailModel,
    pub prefactor: Rational,
}

impl SeriesDescriptor {
    /// `q(j)`, rejecting zeros.
    pub(crate) fn q_nonzero(&self, j: u64) -> Result<BigInt> {
        let v = self.q.eval(j);
        if v == 0 {
            return Err(Error::Descriptor(format!("{}: q({j}) = 0", self.name)));
        }
        Ok(v)
    }

    pub(crate) fn b_nonzero(&self, i: u64) -> Result<BigInt> {
        let v = self.b.eval(i);
        if v == 0 {
            return Err(Error::Descriptor(format!("{}: b({i}) = 0", self.name)));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `b(i) < 2`
    SmallB { value: BigInt },
    /// `|p(j)| > |q(j)|`
    RatioAboveOne { p: BigInt, q: BigInt },
}

/// First index at which the admissibility conditions fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionViolation {
    pub index: u64,
    pub kind: ViolationKind,
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.index;
        match &self.kind {
            ViolationKind::SmallB { value } => write!(f, "b({i})={value} < 2"),
            ViolationKind::RatioAboveOne { p, q } => {
                write!(f, "|p({i})/q({i})| = |{p}/{q}| > 1")
            }
        }
    }
}

/// Require `b(i) >= 2` and `|p(j)/q(j)| <= 1` for all `i, j` in `0..=r`.
pub fn check_conditions(s: &SeriesDescriptor, r: u64) -> Result<()> {
    for i in 0..=r {
        let b = s.b.eval(i);
        if b < 2 {
            return Err(Error::Condition {
                series: s.name.clone(),
                violation: ConditionViolation {
                    index: i,
                    kind: ViolationKind::SmallB { value: b },
                },
            });
        }
        let q = s.q_nonzero(i)?;
        let p = s.p.eval(i);
        if p.cmp_abs(&q) == Ordering::Greater {
            return Err(Error::Condition {
                series: s.name.clone(),
                violation: ConditionViolation {
                    index: i,
                    kind: ViolationKind::RatioAboveOne { p, q },
                },
            });
        }
    }
    Ok(())
}

/// `W = max |a(i)|, |b(i)|, |p(j)|, |q(j)|` over `0..=r`, and `omega = l(W) + 1`.
pub fn scan_w(s: &SeriesDescriptor, r: u64) -> (BigInt, u64) {
    let mut w = BigInt::new();
    for i in 0..=r {
        for poly in [&s.a, &s.b, &s.p, &s.q] {
            let v = abs(&poly.eval(i));
            if v > w {
                w = v;
            }
        }
    }
    let omega = bit_length(&w) + 1;
    (w, omega)
}

pub fn terms_needed(s: &SeriesDescriptor, k: u64) -> u64 {
    s.tail.terms(k)
}

/// Working precision `m = (n+1) + ceil(log2(n+1) + 2 log2(r) + log2(W))`.
///
/// The ceiling is exact: it equals `ceil(log2 X)` for the integer
/// `X = (n+1) r^2 W`, which is `l(X - 1)`.
pub fn choose_m(n: u64, r: u64, w: &BigInt) -> u64 {
    let r = BigInt::from(r.max(1));
    let x = BigInt::from(n + 1) * &r * &r * abs(w).max(BigInt::from(1));
    (n + 1) + bit_length(&(x - 1u32))
}

/// Guard bits so that scaling by the prefactor does not inflate the error:
/// `max(0, ceil(log2 |prefactor|))`.
pub fn prefactor_guard_bits(prefactor: &Rational) -> u64 {
    prefactor
        .ceil_log2_abs()
        .map(|e| e.max(0) as u64)
        .unwrap_or(0)
}

/// Block geometry for a partial sum ending at index `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub r: u64,
    pub k1: u64,
    pub r1: u64,
}

impl BlockLayout {
    /// Minimal `k1` with `2^k1 >= r` (at least 1), and `r1 = ceil(r / k1)`.
    pub fn for_terms(r: u64) -> Self {
        let mut k1 = 1u64;
        while (1u128 << k1) < r as u128 {
            k1 += 1;
        }
        Self {
            r,
            k1,
            r1: r.div_ceil(k1),
        }
    }

    /// Inclusive index range summed by block `t` (1-based), or `None` if it
    /// starts past `r`. The last block always runs to `r`, so the blocks
    /// exactly cover `0..=r`.
    pub fn block_range(&self, t: u64) -> Option<(u64, u64)> {
        assert!(t >= 1 && t <= self.k1, "block index {t} outside 1..={}", self.k1);
        let start = (t - 1) * self.r1;
        let end = if t == self.k1 {
            self.r
        } else {
            (t * self.r1 - 1).min(self.r)
        };
        (start <= end).then_some((start, end))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPlan {
    /// Target bits this plan was built for.
    pub n: u64,
    pub r: u64,
    pub k1: u64,
    pub r1: u64,
    pub w: BigInt,
    pub omega: u64,
    pub m: u64,
}

impl EvalPlan {
    pub fn layout(&self) -> BlockLayout {
        BlockLayout {
            r: self.r,
            k1: self.k1,
            r1: self.r1,
        }
    }
}

pub fn plan_evaluation(s: &SeriesDescriptor, n: u64) -> Result<EvalPlan> {
    if n == 0 {
        return Err(Error::Usage("target precision must be at least 1 bit".into()));
    }
    let r = terms_needed(s, n + 1);
    check_conditions(s, r)?;
    let BlockLayout { k1, r1, .. } = BlockLayout::for_terms(r);
    let (w, omega) = scan_w(s, r);
    let m = choose_m(n, r, &w);
    Ok(EvalPlan {
        n,
        r,
        k1,
        r1,
        w,
        omega,
        m,
    })
}
