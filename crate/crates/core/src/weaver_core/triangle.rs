//! The geometric triangle: row `n` lists `f^popcount(k)` for `k < 2^n`,
//! where `f = p / (1 - p)`, and is built by `f_n = (f_{n-1}, f * f_{n-1})`.

use crate::error::{Result, WeaverError};
use crate::scalar::{ProbValue, Scalar};

/// Largest row materialized by [`triangle_row`].
pub const TRIANGLE_CAP: u32 = 26;

/// The ratio `f = p / (1 - p)` between the masses of `k + 1` and `k` for even `k`.
pub fn fold_factor<T: Scalar>(p: &ProbValue<T>) -> Result<T> {
    if p.is_one() {
        return Err(WeaverError::domain(
            "fold factor p/(1-p) is undefined at p = 1; use the direct formula",
        ));
    }
    Ok(p.value().clone() / p.complement().into_inner())
}

/// Row `n` of the triangle after taking logarithms to base `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleRow {
    n: u32,
    exponents: Vec<u8>,
    row_sum: u128,
}

impl TriangleRow {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    /// `s_n`, the sum of the row.
    pub fn row_sum(&self) -> u128 {
        self.row_sum
    }
}

pub fn triangle_row(n: u32) -> Result<TriangleRow> {
    if n > TRIANGLE_CAP {
        return Err(WeaverError::resource(format!(
            "triangle row n = {n} exceeds the cap n <= {TRIANGLE_CAP}"
        )));
    }
    let mut exponents = Vec::with_capacity(1 << n);
    exponents.push(0u8);
    // s_0 = 0, s_{m+1} = 2 s_m + 2^m
    let mut row_sum = 0u128;
    for m in 0..n {
        let len = exponents.len();
        exponents.extend_from_within(..);
        exponents[len..].iter_mut().for_each(|e| *e += 1);
        row_sum = 2 * row_sum + (1u128 << m);
    }
    Ok(TriangleRow {
        n,
        exponents,
        row_sum,
    })
}

/// Row `n` of the multiplicative triangle itself, `f^e` for each exponent `e`.
pub fn geometric_row<T: Scalar>(n: u32, f: &T) -> Result<Vec<T>> {
    let row = triangle_row(n)?;
    let powers: Vec<T> = (0..=n).map(|e| f.powu(e)).collect();
    Ok(row
        .exponents
        .iter()
        .map(|&e| powers[e as usize].clone())
        .collect())
}
