//! The limit law of `Y_n` as `n -> infinity`, identical to the binomial
//! multiplicative cascade on `[0, 1]`: each dyadic interval hands a
//! fraction `1 - p` of its mass to its left half and `p` to its right half.
//!
//! The measure has no density unless `p = 1/2`, so it is only represented
//! through exact evaluators: the distribution function at dyadic points,
//! dyadic interval masses, and the two moments.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, WeaverError};
use crate::process::ReplicationStream;
use crate::scalar::{ProbValue, Rational, Scalar};

/// Deepest dyadic level accepted.
pub const LEVEL_CAP: u32 = 62;

/// Deepest level for which a full staircase table is produced.
pub const TABLE_LEVEL_CAP: u32 = 24;

/// `k / 2^m` in `[0, 1]`, stored with `k` odd unless the value is 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: u64,
    level: u32,
}

impl DyadicRational {
    pub fn new(numerator: u64, level: u32) -> Result<Self> {
        if level > LEVEL_CAP {
            return Err(WeaverError::domain(format!(
                "dyadic level {level} exceeds the cap {LEVEL_CAP}"
            )));
        }
        if numerator > 1u64 << level {
            return Err(WeaverError::domain(format!(
                "{numerator}/2^{level} is outside [0, 1]"
            )));
        }
        if numerator == 0 {
            return Ok(DyadicRational { numerator: 0, level: 0 });
        }
        let shift = numerator.trailing_zeros().min(level);
        Ok(DyadicRational {
            numerator: numerator >> shift,
            level: level - shift,
        })
    }

    /// Accepts a rational whose reduced denominator is a power of two.
    pub fn from_rational(x: &Rational) -> Result<Self> {
        let not_dyadic = || WeaverError::domain(format!("{x} is not a dyadic rational in [0, 1]"));
        if x.is_negative() || *x > Rational::one() {
            return Err(not_dyadic());
        }
        let den = x.denom();
        let level = den.trailing_zeros().unwrap_or(0);
        if *den != BigInt::one() << level {
            return Err(not_dyadic());
        }
        let level = u32::try_from(level).map_err(|_| not_dyadic())?;
        let numerator = x.numer().to_u64().ok_or_else(not_dyadic)?;
        DyadicRational::new(numerator, level)
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.numerator.into(), BigInt::one() << self.level)
    }

    /// Binary digits `d_1 d_2 ... d_m` after the point (empty for 0 and 1).
    pub fn digits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.level).rev().map(move |b| self.numerator >> b & 1 == 1)
    }

    fn is_one(&self) -> bool {
        self.numerator == 1 && self.level == 0
    }
}

/// `F(x)` of the limit law at a dyadic point.
///
/// With `x = 0.d_1 d_2 ... d_m`, every digit `d_i = 1` adds the left-half
/// mass of the interval singled out by the digits before it:
/// `F(x) = sum_{i : d_i = 1} (prod_{j < i} w_{d_j}) (1 - p)`.
pub fn hem_cdf<T: Scalar>(p: &ProbValue<T>, x: &DyadicRational) -> T {
    if x.is_one() {
        return T::one();
    }
    let lo = p.complement().into_inner();
    let hi = p.value().clone();
    let mut prefix = T::one();
    let mut total = T::zero();
    for digit in x.digits() {
        if digit {
            total = total + prefix.clone() * lo.clone();
            prefix = prefix * hi.clone();
        } else {
            prefix = prefix * lo.clone();
        }
    }
    total
}

/// `F(x)` for a rational `x`, which must be dyadic.
pub fn hem_cdf_at<T: Scalar>(p: &ProbValue<T>, x: &Rational) -> Result<T> {
    Ok(hem_cdf(p, &DyadicRational::from_rational(x)?))
}

/// Values of `F` at the two level-`m` dyadic neighbours of `x`.
///
/// `F` at a non-dyadic `x` is only known as a limit; it lies in the
/// returned interval, whose width is the mass of one level-`m` interval.
pub fn hem_cdf_bracket<T: Scalar>(p: &ProbValue<T>, x: &Rational, level: u32) -> Result<(T, T)> {
    if x.is_negative() || *x > Rational::one() {
        return Err(WeaverError::domain(format!("{x} is outside [0, 1]")));
    }
    if level > LEVEL_CAP {
        return Err(WeaverError::domain(format!(
            "dyadic level {level} exceeds the cap {LEVEL_CAP}"
        )));
    }
    let scaled = x.numer() * (BigInt::one() << level);
    let (floor, rem) = scaled.div_rem(x.denom());
    let floor = floor.to_u64().expect("x <= 1");
    let ceil = if rem.is_zero() { floor } else { floor + 1 };
    let lo = hem_cdf(p, &DyadicRational::new(floor, level)?);
    let hi = hem_cdf(p, &DyadicRational::new(ceil, level)?);
    Ok((lo, hi))
}

/// Mass of `[k / 2^level, (k + 1) / 2^level]`: the product over the binary
/// digits of `k` of `1 - p` (digit 0) or `p` (digit 1).
pub fn interval_mass<T: Scalar>(p: &ProbValue<T>, level: u32, k: u64) -> Result<T> {
    if level > LEVEL_CAP {
        return Err(WeaverError::domain(format!(
            "dyadic level {level} exceeds the cap {LEVEL_CAP}"
        )));
    }
    if k >= 1u64 << level {
        return Err(WeaverError::domain(format!(
            "interval index {k} must be below 2^{level}"
        )));
    }
    let lo = p.complement().into_inner();
    let hi = p.value().clone();
    Ok((0..level).fold(T::one(), |acc, b| {
        acc * if k >> b & 1 == 1 { hi.clone() } else { lo.clone() }
    }))
}

/// `(E Y, Var Y) = (p, p (1 - p) / 3)`.
pub fn hem_moments<T: Scalar>(p: &ProbValue<T>) -> (T, T) {
    let three = T::from_u128(3);
    let variance = p.value().clone() * p.complement().into_inner() / three;
    (p.value().clone(), variance)
}

/// `ln f_n(j)` where `f_n(j) = (2^n - 1) p^j (1 - p)^(n - j)` is the
/// height of the step-density that spreads mass `p^j (1-p)^(n-j)` over a
/// cell of width `1 / (2^n - 1)`. Computed in log space.
///
/// For `p = 1/2` this is `ln(1 - 2^-n)` for every `j`; otherwise the
/// outermost cells diverge to `+inf` and `-inf` as `n` grows.
pub fn density_diagnostic(n: u32, p: f64, j: u32) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(WeaverError::domain(format!(
            "density diagnostic needs 0 < p < 1, got {p}"
        )));
    }
    if n == 0 || j > n {
        return Err(WeaverError::domain(format!(
            "need n >= 1 and j <= n, got n = {n}, j = {j}"
        )));
    }
    let log_size = f64::from(n) * std::f64::consts::LN_2 + (-(0.5f64).powi(n as i32)).ln_1p();
    Ok(log_size + f64::from(j) * p.ln() + f64::from(n - j) * (-p).ln_1p())
}

/// The full level-`m` staircase: `(v, F(v))` for `v = j / 2^m`, `j = 0..=2^m`.
pub fn hem_staircase<T: Scalar>(
    p: &ProbValue<T>,
    level: u32,
) -> Result<Vec<(DyadicRational, T)>> {
    if level > TABLE_LEVEL_CAP {
        return Err(WeaverError::resource(format!(
            "staircase level {level} exceeds the table cap {TABLE_LEVEL_CAP}"
        )));
    }
    (0..=1u64 << level)
        .map(|j| {
            let v = DyadicRational::new(j, level)?;
            Ok((v, hem_cdf(p, &v)))
        })
        .collect()
}

/// Draws from the limit law truncated at `level` binary digits.
///
/// Each digit is 1 with probability `p`; the midpoint of the selected
/// level-`level` interval is returned. Coupled through the same digits,
/// the draw is within `2^-(level+1)` of an exact draw, and its
/// distribution function equals `F` at every level-`level` dyadic point.
pub fn sample_truncated(p: f64, level: u32, stream: &mut ReplicationStream) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WeaverError::domain(format!("probability {p} is outside [0, 1]")));
    }
    if level == 0 || level > 52 {
        return Err(WeaverError::domain(format!(
            "sampling level must be in 1..=52, got {level}"
        )));
    }
    let mut k = 0u64;
    for _ in 0..level {
        k = (k << 1) | u64::from(stream.bernoulli(p));
    }
    Ok((k as f64 + 0.5) / (1u64 << level) as f64)
}
