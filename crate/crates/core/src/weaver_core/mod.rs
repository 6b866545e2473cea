//! The weaver's distribution `W(n, p)`.
//!
//! After `n` selections the choice vector is packed into an integer `k`
//! whose bit `i - 1` records the `i`-th selection (1 = population H1), so
//! the conditional sum of all observations given the choices is exactly
//! `k`. `Y_n` then takes the value `y_k = k / (2^n - 1)` with probability
//! `p^popcount(k) (1 - p)^(n - popcount(k))`.

mod moments;
mod pmf;
mod staircase;
mod triangle;

pub use moments::{
    mean, mean_decomposition, mixing_sum, variance, variance_per_bit, variance_ratio,
    weaving_sum,
};
pub use pmf::{jump_sizes, pmf_point, pmf_vector, reflect, Construction, WeaverDistribution};
pub use staircase::{cdf_eval, jump_histogram, JumpClass};
pub use triangle::{fold_factor, geometric_row, triangle_row, TriangleRow, TRIANGLE_CAP};

use crate::error::{Result, WeaverError};
use crate::scalar::{Rational, Scalar, POINT_EVAL_CAP};

/// The `n`-bit record of which population each selection picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChoiceVector {
    n: u32,
    k: u64,
}

impl ChoiceVector {
    pub fn new(n: u32, k: u64) -> Result<Self> {
        check_point_n(n)?;
        check_index(n, k)?;
        Ok(ChoiceVector { n, k })
    }

    /// Builds the vector from selections in the order they were made;
    /// `selections[0]` becomes the least-significant bit.
    pub fn from_selections(selections: &[bool]) -> Result<Self> {
        let k = selections
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        ChoiceVector::new(selections.len() as u32, k)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    /// Outcome of the `i`-th selection, `i` in `1..=n`.
    pub fn selection(&self, i: u32) -> bool {
        debug_assert!((1..=self.n).contains(&i));
        self.k >> (i - 1) & 1 == 1
    }

    /// Number of H1 selections.
    pub fn ones(&self) -> u32 {
        self.k.count_ones()
    }

    /// Number of H0 selections.
    pub fn zeros(&self) -> u32 {
        self.n - self.ones()
    }

    /// `E(S_n | b)`: each H1 batch of size `2^(i-1)` contributes its size.
    pub fn conditional_sum(&self) -> u64 {
        self.k
    }

    /// Bits most-significant first (`b_{n-1} ... b_0`), zero-padded to `n`.
    pub fn bit_string(&self) -> String {
        format!("{:0width$b}", self.k, width = self.n as usize)
    }
}

/// `2^n - 1`, the sample size after `n` selections.
pub fn sample_size(n: u32) -> u64 {
    debug_assert!(n <= 63);
    (1u64 << n) - 1
}

/// Support point `y_k = k / (2^n - 1)`, reduced.
pub fn support_point(n: u32, k: u64) -> Result<Rational> {
    check_point_n(n)?;
    check_index(n, k)?;
    Ok(Rational::new(k.into(), sample_size(n).into()))
}

pub(crate) fn check_point_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(WeaverError::domain(
            "n must be at least 1 (support k/(2^n-1) is undefined at n = 0)",
        ));
    }
    if n > POINT_EVAL_CAP {
        return Err(WeaverError::domain(format!(
            "n = {n} exceeds the pointwise cap n <= {POINT_EVAL_CAP}"
        )));
    }
    Ok(())
}

pub(crate) fn check_full_n<T: Scalar>(n: u32) -> Result<()> {
    if n == 0 {
        return Err(WeaverError::domain(
            "n must be at least 1 (support k/(2^n-1) is undefined at n = 0)",
        ));
    }
    if n > T::FULL_VECTOR_CAP {
        return Err(WeaverError::resource(format!(
            "n = {n} exceeds the {} full-vector cap n <= {}",
            T::MODE.as_str(),
            T::FULL_VECTOR_CAP
        )));
    }
    Ok(())
}

pub(crate) fn check_index(n: u32, k: u64) -> Result<()> {
    if k > sample_size(n) {
        return Err(WeaverError::domain(format!(
            "index k = {k} exceeds 2^n - 1 = {} for n = {n}",
            sample_size(n)
        )));
    }
    Ok(())
}
