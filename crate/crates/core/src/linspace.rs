//! Linear-space evaluation by block-Horner recombination.
//!
//! The partial sum `S(r)` is cut into `k1` blocks of `r1` terms and rewritten
//! as
//!
//! ```text
//! S(r) = sigma_1 + tau_2 [sigma_2 + tau_3 [ ... + tau_k1 sigma_k1 ]]
//! ```
//!
//! where `sigma_t` is the block sum with block-local products and `tau_t`
//! carries the product of `p/q` across the previous block. Each block is
//! computed exactly by binary splitting, divided down to `m` fractional
//! bits, consumed by one Horner step and dropped. Every Horner step
//! truncates back to `m` fractional bits, so no number held by the
//! evaluator is longer than `O(n)` bits.


use crate::bigfix::{abs, bit_length, pow2, rational_to_dyadic, shl, BigInt, Dyadic, Rational};
use crate::binsplit::{classical_series, split_product, split_sum};
use crate::catalog::ConstantFormula;
use crate::error::{Error, StateBoundBreach, Result};
use crate::series::{plan_evaluation, prefactor_guard_bits, BlockLayout, EvalPlan, SeriesDescriptor};

/// Environment switch for the live iterate-magnitude assertion.
pub const ASSERT_STATE_BOUND_ENV: &str = "HYPERSERIES_ASSERT_LEMMA3";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Check `|h_i| < (i+1) r1 W` after every Horner step.
    pub assert_state_bound: bool,
}

impl EvalOptions {
    pub fn from_env() -> Self {
        let on = std::env::var(ASSERT_STATE_BOUND_ENV)
            .map(|v| v == "1" || v.eq_ignore_ascii_case("true"))
            .unwrap_or(false);
        Self { assert_state_bound: on }
    }
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self::from_env()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Classical,
    Linspace,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Classical => "classical",
            Algorithm::Linspace => "linspace",
        }
    }
}

/// One block's truncated sum and (for `t >= 2`) its carried product.
#[derive(Clone, Debug)]
pub struct BlockValue {
    pub t: u64,
    pub sigma: Dyadic,
    pub tau: Option<Dyadic>,
}

/// Exact `sigma_t = xi_t + sigma_t'` for block `t` of `layout`.
pub fn block_sigma_exact(s: &SeriesDescriptor, layout: &BlockLayout, t: u64) -> Result<Rational> {
    let Some((start, end)) = layout.block_range(t) else {
        return Ok(Rational::zero());
    };
    if t == 1 {
        return Ok(split_sum(s, start, end)?.into_sum());
    }
    // xi_t = a(start) / b(start): the product up to `start` is carried by tau.
    let xi_num = s.a.eval(start);
    let xi_den = s.b_nonzero(start)?;
    if start == end {
        return Ok(Rational::new(xi_num, xi_den).expect("b is nonzero"));
    }
    let rest = split_sum(s, start + 1, end)?;
    let bq = rest.b * rest.q;
    let num = xi_num * &bq + &xi_den * rest.t;
    Ok(Rational::new(num, xi_den * bq).expect("nonzero denominator"))
}

/// Exact `tau_t`: `prod_{j=0..r1} p/q` for `t = 2`, else the product over
/// `(t-2) r1 + 1 ..= (t-1) r1`.
pub fn block_tau_exact(s: &SeriesDescriptor, layout: &BlockLayout, t: u64) -> Result<Rational> {
    assert!(t >= 2 && t <= layout.k1, "tau index {t} outside 2..={}", layout.k1);
    let (j1, j2) = if t == 2 {
        (0, layout.r1)
    } else {
        ((t - 2) * layout.r1 + 1, (t - 1) * layout.r1)
    };
    let (p, q) = split_product(s, j1, j2)?;
    Ok(Rational::new(p, q).expect("Q is nonzero"))
}

/// `sigma_t` truncated to `plan.m` fractional bits.
pub fn block_sigma(s: &SeriesDescriptor, plan: &EvalPlan, t: u64) -> Result<Dyadic> {
    Ok(rational_to_dyadic(&block_sigma_exact(s, &plan.layout(), t)?, plan.m))
}

/// `tau_t` truncated to `plan.m` fractional bits.
pub fn block_tau(s: &SeriesDescriptor, plan: &EvalPlan, t: u64) -> Result<Dyadic> {
    Ok(rational_to_dyadic(&block_tau_exact(s, &plan.layout(), t)?, plan.m))
}

pub fn block_value(s: &SeriesDescriptor, plan: &EvalPlan, t: u64) -> Result<BlockValue> {
    let sigma = block_sigma(s, plan, t)?;
    let tau = if t >= 2 {
        Some(block_tau(s, plan, t)?)
    } else {
        None
    };
    Ok(BlockValue { t, sigma, tau })
}

/// Size bookkeeping from one Horner run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HornerStats {
    pub blocks: u64,
    /// Largest mantissa (bits) among the truncated sigma, tau and h values.
    pub max_state_bits: u64,
    /// Largest `|tau*_t|`, as mantissa bits at `m` fractional bits.
    pub max_tau_bits: u64,
    /// Set when every tau satisfied `|tau*| <= 1 + 2^-m`.
    pub tau_bounded: bool,
    pub state_bound_checked: bool,
}

fn state_bound_check(s: &SeriesDescriptor, plan: &EvalPlan, step: u64, h: &Dyadic) -> Result<()> {
    // |h| < (i+1) r1 W  <=>  |mantissa| < ((i+1) r1 W) << m
    let bound = BigInt::from(step + 1) * BigInt::from(plan.r1.max(1)) * &plan.w;
    let magnitude = abs(h.mantissa());
    if magnitude < shl(&bound, plan.m) {
        return Ok(());
    }
    Err(Error::StateBound(StateBoundBreach {
        series: s.name.clone(),
        step,
        bound: bound.to_string(),
        observed_bits: bit_length(&magnitude),
    }))
}

/// Block-Horner evaluation of `S(plan.r)` at `plan.m` fractional bits.
pub fn horner_eval(s: &SeriesDescriptor, plan: &EvalPlan, opts: EvalOptions) -> Result<Dyadic> {
    horner_eval_traced(s, plan, opts).map(|(h, _)| h)
}

pub fn horner_eval_traced(
    s: &SeriesDescriptor,
    plan: &EvalPlan,
    opts: EvalOptions,
) -> Result<(Dyadic, HornerStats)> {
    let m = plan.m;
    let k1 = plan.k1;
    let tau_limit = pow2(m) + 1u32;
    let mut stats = HornerStats {
        tau_bounded: true,
        state_bound_checked: opts.assert_state_bound,
        ..HornerStats::default()
    };

    let mut h = block_sigma(s, plan, k1)?;
    stats.blocks = 1;
    stats.max_state_bits = h.mantissa_bits();
    if opts.assert_state_bound {
        state_bound_check(s, plan, 1, &h)?;
    }

    for i in 2..=k1 {
        let t = k1 - i + 1;
        // Only this block's sigma and tau are live alongside h.
        let sigma = block_sigma(s, plan, t)?;
        let tau = block_tau(s, plan, t + 1)?;

        if abs(tau.mantissa()) > tau_limit {
            stats.tau_bounded = false;
        }
        stats.max_tau_bits = stats.max_tau_bits.max(tau.mantissa_bits());
        stats.max_state_bits = stats
            .max_state_bits
            .max(sigma.mantissa_bits())
            .max(tau.mantissa_bits());

        let product = tau.mul_exact(&h);
        drop(tau);
        h = (&sigma + &product).truncate(m);

        stats.blocks += 1;
        stats.max_state_bits = stats.max_state_bits.max(h.mantissa_bits());
        if opts.assert_state_bound {
            state_bound_check(s, plan, i, &h)?;
        }
    }
    Ok((h, stats))
}

/// The block-Horner recombination carried out in exact rational arithmetic.
/// Equals `S(layout.r)` identically.
pub fn horner_exact(s: &SeriesDescriptor, layout: &BlockLayout) -> Result<Rational> {
    let mut h = block_sigma_exact(s, layout, layout.k1)?;
    for t in (1..layout.k1).rev() {
        let sigma = block_sigma_exact(s, layout, t)?;
        let tau = block_tau_exact(s, layout, t + 1)?;
        h = (&sigma + &(&tau * &h)).reduced();
    }
    Ok(h)
}

/// Target bits used internally so that scaling by the prefactor and the final
/// rounding to `n` bits stay inside `2^-n`.
pub fn internal_target(s: &SeriesDescriptor, n: u64) -> u64 {
    n + 2 + prefactor_guard_bits(&s.prefactor)
}

#[derive(Clone, Debug)]
pub struct SeriesEvaluation {
    /// `prefactor * S` rounded to `n` fractional bits.
    pub value: Dyadic,
    pub plan: EvalPlan,
    pub stats: HornerStats,
}

/// `prefactor * S` to exactly `n` fractional bits with error at most `2^-n`.
pub fn evaluate_series(s: &SeriesDescriptor, n: u64) -> Result<Dyadic> {
    evaluate_series_with(s, n, EvalOptions::default()).map(|e| e.value)
}

pub fn evaluate_series_with(
    s: &SeriesDescriptor,
    n: u64,
    opts: EvalOptions,
) -> Result<SeriesEvaluation> {
    if n == 0 {
        return Err(Error::Usage("target precision must be at least 1 bit".into()));
    }
    let plan = plan_evaluation(s, internal_target(s, n))?;
    let (h, stats) = horner_eval_traced(s, &plan, opts)?;
    let scaled = if s.prefactor == Rational::one() {
        h
    } else {
        // exact product with the prefactor's numerator, then truncate back to
        // m fractional bits by dividing by its (small) denominator
        let num = BigInt::from(s.prefactor.num() * h.mantissa());
        Dyadic::new(num / s.prefactor.den(), h.frac_bits())
    };
    Ok(SeriesEvaluation {
        value: scaled.round_output(n),
        plan,
        stats,
    })
}

/// Per-series record of a constant evaluation.
#[derive(Clone, Debug)]
pub struct SeriesRun {
    pub name: String,
    pub coeff: Rational,
    /// Bits the series was evaluated to.
    pub bits: u64,
    pub r: u64,
    /// Present for the linear-space algorithm.
    pub plan: Option<EvalPlan>,
    pub stats: Option<HornerStats>,
}

#[derive(Clone, Debug)]
pub struct ConstantEvaluation {
    pub value: Dyadic,
    pub guard_bits: u64,
    pub series: Vec<SeriesRun>,
}

/// Guard bits for a linear combination: `ceil(log2 sum |c|) + 1`, plus one
/// more when some coefficient is not an integer (the combination then needs
/// a truncating division).
pub fn combination_guard_bits(f: &ConstantFormula) -> u64 {
    let total = f
        .terms
        .iter()
        .fold(Rational::zero(), |acc, (c, _)| &acc + &c.abs());
    let base = total.ceil_log2_abs().map(|e| (e + 1).max(0) as u64).unwrap_or(0);
    let fractional = f.terms.iter().any(|(c, _)| !c.is_integer());
    base + u64::from(fractional)
}

pub fn evaluate_constant(f: &ConstantFormula, n: u64) -> Result<Dyadic> {
    evaluate_constant_with(f, n, Algorithm::Linspace, EvalOptions::default()).map(|e| e.value)
}

fn run_series(
    s: &SeriesDescriptor,
    coeff: &Rational,
    bits: u64,
    algo: Algorithm,
    opts: EvalOptions,
) -> Result<(Dyadic, SeriesRun)> {
    match algo {
        Algorithm::Linspace => {
            let e = evaluate_series_with(s, bits, opts)?;
            let run = SeriesRun {
                name: s.name.clone(),
                coeff: coeff.clone(),
                bits,
                r: e.plan.r,
                plan: Some(e.plan),
                stats: Some(e.stats),
            };
            Ok((e.value, run))
        }
        Algorithm::Classical => {
            let c = classical_series(s, bits)?;
            let run = SeriesRun {
                name: s.name.clone(),
                coeff: coeff.clone(),
                bits,
                r: c.r,
                plan: None,
                stats: None,
            };
            Ok((c.value, run))
        }
    }
}

/// `sum c_i S_i` to exactly `n` fractional bits with error at most `2^-n`.
pub fn evaluate_constant_with(
    f: &ConstantFormula,
    n: u64,
    algo: Algorithm,
    opts: EvalOptions,
) -> Result<ConstantEvaluation> {
    if f.terms.is_empty() {
        return Err(Error::Usage(format!("formula {} has no terms", f.name)));
    }
    if let [(c, s)] = f.terms.as_slice() {
        if *c == Rational::one() {
            let (value, run) = run_series(s, c, n, algo, opts)?;
            return Ok(ConstantEvaluation {
                value,
                guard_bits: 0,
                series: vec![run],
            });
        }
    }

    let g = combination_guard_bits(f);
    let bits = n + g;
    let mut total = Rational::zero();
    let mut runs = Vec::with_capacity(f.terms.len());
    for (c, s) in &f.terms {
        let (value, run) = run_series(s, c, bits, algo, opts)?;
        total = &total + &(c * &value.to_rational());
        runs.push(run);
    }
    let combined = rational_to_dyadic(&total, bits);
    Ok(ConstantEvaluation {
        value: combined.round_output(n),
        guard_bits: g,
        series: runs,
    })
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

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_i64s(n, d).unwrap()
    }

    /// A plan with an explicit layout and a large `m`, for hand-checked blocks.
    fn plan_with(r: u64, m: u64) -> EvalPlan {
        let l = BlockLayout::for_terms(r);
        EvalPlan {
            n: 0,
            r,
            k1: l.k1,
            r1: l.r1,
            w: BigInt::from(2),
            omega: 3,
            m,
        }
    }

    #[test]
    fn sigma_examples() {
        let g = geometric();
        // r = 3: k1 = 2, r1 = 2
        let plan = plan_with(3, 40);
        assert_eq!(block_sigma(&g, &plan, 1).unwrap().to_rational(), q(3, 8));
        assert_eq!(block_sigma(&g, &plan, 2).unwrap().to_rational(), q(3, 4));
    }

    #[test]
    fn xi_only_block() {
        let g = geometric();
        // r = 9: k1 = 4, r1 = 3, last block is the single index 9
        let l = BlockLayout::for_terms(9);
        assert_eq!(l.block_range(4), Some((9, 9)));
        assert_eq!(block_sigma_exact(&g, &l, 4).unwrap(), q(1, 2));
    }

    #[test]
    fn tau_examples() {
        let g = geometric();
        let plan = plan_with(5, 40);
        assert_eq!((plan.k1, plan.r1), (3, 2));
        assert_eq!(block_tau(&g, &plan, 2).unwrap().to_rational(), q(1, 8));
        assert_eq!(block_tau(&g, &plan, 3).unwrap().to_rational(), q(1, 4));

        let mut unit = geometric();
        unit.p = Polynomial::from_i64s(&[3, 1]);
        unit.q = Polynomial::from_i64s(&[3, 1]);
        for t in 2..=3 {
            assert_eq!(block_tau(&unit, &plan, t).unwrap().to_rational(), Rational::one());
        }
    }

    #[test]
    fn horner_hand_example() {
        let g = geometric();
        let plan = plan_with(3, 60);
        let h = horner_eval(&g, &plan, EvalOptions { assert_state_bound: true }).unwrap();
        assert_eq!(h.to_rational(), q(15, 32));
    }

    #[test]
    fn single_block_is_just_sigma() {
        let g = geometric();
        let plan = plan_with(2, 30);
        assert_eq!(plan.k1, 1);
        let h = horner_eval(&g, &plan, EvalOptions { assert_state_bound: true }).unwrap();
        assert_eq!(h, block_sigma(&g, &plan, 1).unwrap());
    }

    #[test]
    fn truncation_bound_geometric_n100() {
        let g = geometric();
        let plan = plan_evaluation(&g, 100).unwrap();
        assert_eq!(plan.m, 122);
        let h = horner_eval(&g, &plan, EvalOptions { assert_state_bound: true }).unwrap();
        let exact = split_sum(&g, 0, plan.r).unwrap().into_sum();
        let err = (&h.to_rational() - &exact).abs().shl(plan.m);
        let bound = Rational::from(BigInt::from(plan.m * plan.k1 * plan.k1) * &plan.w);
        assert!(err < bound);
        // 2^-m m k1^2 W is itself far below 2^-101
        assert!(bound < Rational::one().shl(plan.m - 101));
    }

    #[test]
    fn evaluate_series_geometric() {
        let v = evaluate_series(&geometric(), 64).unwrap();
        assert_eq!(v.frac_bits(), 64);
        assert_eq!(v, Dyadic::new(BigInt::from(1), 1));
    }

    #[test]
    fn empty_formula_is_usage_error() {
        let f = ConstantFormula {
            name: "nothing".into(),
            terms: vec![],
        };
        assert!(matches!(evaluate_constant(&f, 10), Err(Error::Usage(_))));
    }

    #[test]
    fn state_bound_breach_is_reported() {
        // Claiming W = 1/huge bound by shrinking W forces a breach.
        let g = geometric();
        let mut plan = plan_with(20, 60);
        plan.w = BigInt::from(0);
        let err = horner_eval(&g, &plan, EvalOptions { assert_state_bound: true }).unwrap_err();
        assert!(matches!(err, Error::StateBound(_)));
        assert!(horner_eval(&g, &plan, EvalOptions { assert_state_bound: false }).is_ok());
    }
}
