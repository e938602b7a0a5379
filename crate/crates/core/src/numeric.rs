//! Exact counts, exact ratios and the float helpers used by the estimators.
//!
//! Model counts are [`Count`] (arbitrary precision) and evidence values are
//! [`Ratio`] (lowest-terms big rationals). The counter accumulates in any
//! [`CountScalar`], which lets small instances run on `u128` and fall back
//! to big integers only when `2^n` no longer fits.

use std::ops::AddAssign;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};

pub type Count = BigUint;
pub type Ratio = BigRational;

/// Integer type the path accumulator sums into.
pub trait CountScalar: Clone + Zero + One + AddAssign + for<'a> AddAssign<&'a Self> {
    /// Largest exponent for which `pow2` is representable.
    const MAX_EXP: Option<u32>;

    fn pow2(exp: u32) -> Self;
    fn half(&self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn to_count(&self) -> Count;
}

impl CountScalar for u128 {
    const MAX_EXP: Option<u32> = Some(126);

    fn pow2(exp: u32) -> Self {
        1u128 << exp
    }
    fn half(&self) -> Self {
        self >> 1
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn to_count(&self) -> Count {
        BigUint::from(*self)
    }
}

impl CountScalar for BigUint {
    const MAX_EXP: Option<u32> = None;

    fn pow2(exp: u32) -> Self {
        BigUint::one() << exp
    }
    fn half(&self) -> Self {
        self >> 1u32
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn to_count(&self) -> Count {
        self.clone()
    }
}

pub fn pow2(exp: usize) -> Count {
    BigUint::one() << exp
}

pub fn ratio(num: &Count, den: &Count) -> Ratio {
    BigRational::new(num.clone().into(), den.clone().into())
}

pub fn ratio_from_ints(num: i64, den: i64) -> Ratio {
    BigRational::new(num.into(), den.into())
}

pub fn half() -> Ratio {
    ratio_from_ints(1, 2)
}

pub fn count_to_float<T: Float>(c: &Count) -> T {
    T::from(c.to_f64().unwrap_or(f64::INFINITY)).unwrap_or_else(T::infinity)
}

pub fn ratio_to_float<T: Float>(r: &Ratio) -> T {
    // Lossy path through f64; ratio components can exceed f64 range while
    // the quotient does not, so scale both down first when needed.
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return T::from(v).unwrap_or_else(T::nan);
        }
    }
    let num = r.numer().bits();
    let den = r.denom().bits();
    let shift = num.max(den).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    T::from(n / d).unwrap_or_else(T::nan)
}

/// Renders `value` with `digits` significant digits. Display only.
pub fn decimal(value: &Ratio, digits: usize) -> String {
    let x: f64 = ratio_to_float(value);
    sig_digits(x, digits)
}

pub fn sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// `1 - (1 - p)^m`, evaluated without forming `(1 - p)^m` directly.
pub fn one_minus_pow_complement<T: Float>(p: T, m: T) -> T {
    if p >= T::one() {
        return if m > T::zero() { T::one() } else { T::zero() };
    }
    if p <= T::zero() || m <= T::zero() {
        return T::zero();
    }
    -(m * (-p).ln_1p()).exp_m1()
}
