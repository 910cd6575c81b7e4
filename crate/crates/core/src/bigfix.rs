//! Exact integers, unreduced rationals and dyadic fixed-point numbers.
//!
//! Big-integer arithmetic is delegated to GMP through `rug`; everything in
//! this module is a thin, exactly specified layer on top of it. Truncation is
//! always toward zero on the sign-magnitude representation, so a truncated
//! value never has larger magnitude than the exact one.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::DivRounding;

use crate::error::{Error, Result};

pub use rug::Integer as BigInt;

/// `l(u)`: number of bits in the binary representation of `|u|` (0 for 0).
pub fn bit_length(u: &BigInt) -> u64 {
    u64::from(u.significant_bits())
}

/// `x * 2^k`.
pub fn shl(x: &BigInt, k: u64) -> BigInt {
    BigInt::from(x << k as usize)
}

/// `2^k`.
pub fn pow2(k: u64) -> BigInt {
    BigInt::from(1) << k as usize
}

pub(crate) fn abs(x: &BigInt) -> BigInt {
    BigInt::from(x.abs_ref())
}

/// Shift toward zero: `trunc(x / 2^k)`.
pub(crate) fn shr_toward_zero(x: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let magnitude = abs(x) >> k as usize;
    if x.cmp0() == Ordering::Less {
        -magnitude
    } else {
        magnitude
    }
}

/// `num / den` with `den > 0`. Not kept in lowest terms; call
/// [`Rational::reduced`] when that matters.
#[derive(Clone, Debug)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        match den.cmp0() {
            Ordering::Equal => Err(Error::Domain(format!("zero denominator in {num}/0"))),
            Ordering::Greater => Ok(Self { num, den }),
            Ordering::Less => Ok(Self { num: -num, den: -den }),
        }
    }

    pub fn from_i64s(num: i64, den: i64) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Self {
        Self::from(BigInt::new())
    }

    pub fn one() -> Self {
        Self::from(BigInt::from(1))
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn signum(&self) -> Ordering {
        self.num.cmp0()
    }

    pub fn abs(&self) -> Self {
        Self {
            num: abs(&self.num),
            den: self.den.clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.num.is_divisible(&self.den)
    }

    /// Lowest terms.
    pub fn reduced(&self) -> Self {
        let g = BigInt::from(self.num.gcd_ref(&self.den));
        if g == 1 || g == 0 {
            return self.clone();
        }
        Self {
            num: BigInt::from(&self.num / &g),
            den: BigInt::from(&self.den / &g),
        }
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: u64) -> Self {
        Self {
            num: shl(&self.num, k),
            den: self.den.clone(),
        }
    }

    /// Smallest integer `c` with `c >= self`.
    pub fn ceil(&self) -> BigInt {
        self.num.clone().div_ceil(&self.den)
    }

    /// Smallest `e` with `|self| <= 2^e`, or `None` for zero.
    pub fn ceil_log2_abs(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let a = self.abs();
        // 2^(l(num) - l(den) - 1) < |x| < 2^(l(num) - l(den) + 1)
        let mut e = bit_length(&a.num) as i64 - bit_length(&a.den) as i64 - 1;
        while a.cmp_pow2(e) == Ordering::Greater {
            e += 1;
        }
        Some(e)
    }

    /// Compare a nonnegative rational with `2^e`.
    fn cmp_pow2(&self, e: i64) -> Ordering {
        if e >= 0 {
            self.num.cmp(&shl(&self.den, e as u64))
        } else {
            shl(&self.num, (-e) as u64).cmp(&self.den)
        }
    }
}

impl From<BigInt> for Rational {
    fn from(num: BigInt) -> Self {
        Self {
            num,
            den: BigInt::from(1),
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Self::from(BigInt::from(v))
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        BigInt::from(&self.num * &other.den).cmp(&BigInt::from(&other.num * &self.den))
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        if self.den == rhs.den {
            return Rational {
                num: BigInt::from(&self.num + &rhs.num),
                den: self.den.clone(),
            };
        }
        Rational {
            num: BigInt::from(&self.num * &rhs.den) + &rhs.num * &self.den,
            den: BigInt::from(&self.den * &rhs.den),
        }
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational {
            num: BigInt::from(&self.num * &rhs.num),
            den: BigInt::from(&self.den * &rhs.den),
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: BigInt::from(-&self.num),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// `mantissa * 2^(-frac_bits)`.
///
/// Trailing zero bits of the mantissa are never stripped, so `frac_bits`
/// is exactly what the producing operation asked for. Equality and
/// ordering compare represented values.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mantissa: BigInt,
    frac_bits: u64,
}

/// Truncate `x` toward zero to `f` fractional bits; `|result - x| < 2^(-f)`.
pub fn rational_to_dyadic(x: &Rational, f: u64) -> Dyadic {
    let scaled = shl(&x.num, f);
    Dyadic {
        mantissa: scaled / &x.den,
        frac_bits: f,
    }
}

impl Dyadic {
    pub fn new(mantissa: BigInt, frac_bits: u64) -> Self {
        Self { mantissa, frac_bits }
    }

    pub fn zero(frac_bits: u64) -> Self {
        Self::new(BigInt::new(), frac_bits)
    }

    pub fn from_integer(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn frac_bits(&self) -> u64 {
        self.frac_bits
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn signum(&self) -> Ordering {
        self.mantissa.cmp0()
    }

    /// Total size of the mantissa in bits.
    pub fn mantissa_bits(&self) -> u64 {
        bit_length(&self.mantissa)
    }

    pub fn abs(&self) -> Self {
        Self::new(abs(&self.mantissa), self.frac_bits)
    }

    pub fn to_rational(&self) -> Rational {
        Rational {
            num: self.mantissa.clone(),
            den: pow2(self.frac_bits),
        }
    }

    /// Same value with `f >= frac_bits` fractional bits.
    fn widened(&self, f: u64) -> BigInt {
        debug_assert!(f >= self.frac_bits);
        shl(&self.mantissa, f - self.frac_bits)
    }

    /// Exact product with `a.frac_bits + b.frac_bits` fractional bits.
    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(
            BigInt::from(&self.mantissa * &other.mantissa),
            self.frac_bits + other.frac_bits,
        )
    }

    /// Product truncated toward zero to `f` fractional bits.
    pub fn mul_truncate(&self, other: &Dyadic, f: u64) -> Dyadic {
        self.mul_exact(other).truncate(f)
    }

    /// Re-express with `f` fractional bits, discarding low bits toward zero.
    /// Exact when `f >= frac_bits`.
    pub fn truncate(&self, f: u64) -> Dyadic {
        if f >= self.frac_bits {
            Dyadic::new(self.widened(f), f)
        } else {
            Dyadic::new(shr_toward_zero(&self.mantissa, self.frac_bits - f), f)
        }
    }

    /// Nearest multiple of `2^(-n)`, ties away from zero.
    pub fn round_output(&self, n: u64) -> Dyadic {
        if n >= self.frac_bits {
            return Dyadic::new(self.widened(n), n);
        }
        let k = self.frac_bits - n;
        let rounded = (abs(&self.mantissa) + pow2(k - 1)) >> k as usize;
        let mantissa = if self.mantissa.cmp0() == Ordering::Less {
            -rounded
        } else {
            rounded
        };
        Dyadic::new(mantissa, n)
    }

    /// Sign, integer part, point, then exactly `count` digits of the truncated
    /// expansion of `|self|` in base 2 or 10. With `count == 0` the point is
    /// omitted.
    pub fn render_digits(&self, base: u32, count: u64) -> Result<String> {
        if base != 2 && base != 10 {
            return Err(Error::Usage(format!("unsupported base {base}; use 2 or 10")));
        }
        let magnitude = abs(&self.mantissa);
        let f = self.frac_bits;
        let int_part = BigInt::from(&magnitude >> f as usize);
        let frac_part = magnitude - shl(&int_part, f);

        let mut out = String::new();
        if self.mantissa.cmp0() == Ordering::Less {
            out.push('-');
        }
        out.push_str(&int_part.to_string_radix(base as i32));
        if count == 0 {
            return Ok(out);
        }
        out.push('.');

        let digits = if base == 2 {
            if count <= f {
                frac_part >> (f - count) as usize
            } else {
                frac_part << (count - f) as usize
            }
        } else {
            let ten_pow = BigInt::from(BigInt::u_pow_u(10, count as u32));
            (frac_part * ten_pow) >> f as usize
        };
        let digits = if digits == 0 {
            String::new()
        } else {
            digits.to_string_radix(base as i32)
        };
        for _ in digits.len() as u64..count {
            out.push('0');
        }
        out.push_str(&digits);
        Ok(out)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let f = self.frac_bits.max(other.frac_bits);
        self.widened(f).cmp(&other.widened(f))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let f = self.frac_bits.max(rhs.frac_bits);
        Dyadic::new(self.widened(f) + rhs.widened(f), f)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let f = self.frac_bits.max(rhs.frac_bits);
        Dyadic::new(self.widened(f) - rhs.widened(f), f)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(BigInt::from(-&self.mantissa), self.frac_bits)
    }
}

pub fn dyadic_add(a: &Dyadic, b: &Dyadic) -> Dyadic {
    a + b
}

pub fn dyadic_mul_truncate(a: &Dyadic, b: &Dyadic, f: u64) -> Dyadic {
    a.mul_truncate(b, f)
}

pub fn round_output(d: &Dyadic, n: u64) -> Dyadic {
    d.round_output(n)
}

pub fn render_digits(d: &Dyadic, base: u32, count: u64) -> Result<String> {
    d.render_digits(base, count)
}
