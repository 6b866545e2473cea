//! Numeric modes.
//!
//! Every kernel in the crate is generic over [`Scalar`], which is implemented
//! for [`Rational`] (exact mode, arbitrary precision, always reduced) and
//! `f64` (float mode). Exact mode is the ground truth; float mode exists so
//! full vectors can be built for larger `n`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

use crate::error::{Result, WeaverError};

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumericMode {
    Exact,
    Float,
}

impl NumericMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NumericMode::Exact => "exact",
            NumericMode::Float => "float",
        }
    }
}

/// Largest `n` for which pointwise evaluations (pmf at one index, cdf at one
/// point) are accepted in either mode; `2^n - 1` must fit in a `u64`.
pub const POINT_EVAL_CAP: u32 = 62;

pub trait Scalar: Num + Clone + Debug + PartialOrd + Send + Sync + 'static {
    const MODE: NumericMode;
    /// Largest `n` for which a `2^n`-entry vector may be materialized.
    const FULL_VECTOR_CAP: u32;

    fn from_u128(v: u128) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow::pow(self.clone(), exp as usize)
    }

    /// Sum of many terms: exact in exact mode, Neumaier-compensated in float mode.
    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self;
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::Exact;
    const FULL_VECTOR_CAP: u32 = 20;

    fn from_u128(v: u128) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float;
    const FULL_VECTOR_CAP: u32 = 26;

    fn from_u128(v: u128) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powu(&self, exp: u32) -> Self {
        self.powi(exp as i32)
    }

    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

/// Running Neumaier (improved Kahan) sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

const PAIRWISE_BLOCK: usize = 128;

/// Fixed-shape pairwise sum of compensated leaf blocks.
///
/// The reduction tree depends only on `values.len()`, so the result is a
/// pure function of the slice contents regardless of who produced them.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = NeumaierSum::default();
        values.iter().for_each(|&x| acc.add(x));
        return acc.value();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// A probability in `[0, 1]`, in either numeric mode.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct ProbValue<T: Scalar>(T);

impl<T: Scalar> ProbValue<T> {
    pub fn new(value: T) -> Result<Self> {
        // written so that NaN is rejected
        if value >= T::zero() && value <= T::one() {
            Ok(ProbValue(value))
        } else {
            Err(WeaverError::domain(format!(
                "probability {value:?} is outside [0, 1]"
            )))
        }
    }

    pub fn value(&self) -> &T {
        &self.0
    }

    pub fn into_inner(self) -> T {
        self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> ProbValue<T> {
        ProbValue(T::one() - self.0.clone())
    }

    pub fn mode(&self) -> NumericMode {
        T::MODE
    }

    pub fn is_zero(&self) -> bool {
        self.0 == T::zero()
    }

    pub fn is_one(&self) -> bool {
        self.0 == T::one()
    }
}

impl ProbValue<Rational> {
    /// Exact probability `num / den`.
    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(WeaverError::validation("zero denominator"));
        }
        ProbValue::new(Rational::new(num.into(), den.into()))
    }

    pub fn to_float(&self) -> ProbValue<f64> {
        ProbValue(f64::from_rational(&self.0))
    }
}

impl ProbValue<f64> {
    pub fn float(value: f64) -> Result<Self> {
        ProbValue::new(value)
    }
}

/// Parses `"a/b"`, an integer, or a decimal such as `"0.3"` or `"2.5e-3"`
/// into an exact rational. Decimals are expanded exactly (`0.3` is `3/10`).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || WeaverError::validation(format!("cannot parse {text:?} as a rational"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(WeaverError::validation(format!(
                "zero denominator in {text:?}"
            )));
        }
        return Ok(Rational::new(num, den));
    }

    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = body[pos + 1..].parse().map_err(|_| bad())?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let ten = Rational::from_integer(BigInt::from(10));
    let factor = num_traits::pow::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Parses a probability for the requested mode. In float mode decimals go
/// through the standard correctly-rounded `f64` parser.
pub fn parse_probability<T: Scalar>(text: &str) -> Result<ProbValue<T>> {
    let exact = parse_rational(text)?;
    let value = match T::MODE {
        NumericMode::Exact => T::from_rational(&exact),
        NumericMode::Float if !text.contains('/') => {
            let f: f64 = text
                .trim()
                .parse()
                .map_err(|_| WeaverError::validation(format!("cannot parse {text:?}")))?;
            T::from_rational(&rational_from_f64(f)?)
        }
        NumericMode::Float => T::from_rational(&exact),
    };
    ProbValue::new(value)
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x)
        .ok_or_else(|| WeaverError::validation(format!("{x} is not a finite number")))
}
