use crate::error::{Result, WeaverError};
use crate::scalar::{ProbValue, Rational, Scalar};

use super::{check_full_n, check_point_n, jump_sizes, sample_size};

/// `sum_{i<n} (2^i)^2`, the numerator of the variance ratio.
pub fn weaving_sum(n: u32) -> u128 {
    (0..n).map(|i| 1u128 << (2 * i)).sum()
}

/// `sum_{j<n} 2^j (2^n - 1 - 2^j)`, the numerator of the mixing share.
pub fn mixing_sum(n: u32) -> u128 {
    let size = u128::from(sample_size(n));
    (0..n).map(|j| (1u128 << j) * (size - (1u128 << j))).sum()
}

/// For each popcount `r`, the sum of all indices `k < 2^n` with `r` ones.
fn index_sums_by_popcount(n: u32) -> Vec<u128> {
    let mut sums = vec![0u128; n as usize + 1];
    for k in 0..1u64 << n {
        sums[k.count_ones() as usize] += u128::from(k);
    }
    sums
}

/// `E Y_n`, accumulated over all `2^n` support points.
pub fn mean<T: Scalar>(n: u32, p: &ProbValue<T>) -> Result<T> {
    check_full_n::<T>(n)?;
    let sizes = jump_sizes(n, p);
    let sums = index_sums_by_popcount(n);
    let weighted = T::sum_all(
        sizes
            .into_iter()
            .zip(sums)
            .map(|(h, s)| h * T::from_u128(s)),
    );
    Ok(weighted / T::from_u128(sample_size(n).into()))
}

/// Terms `t_0, ..., t_{n-1}` of the mean, where `t_j` collects the support
/// points whose choice vector has exactly `j` zeros.
///
/// Each term is `p^(n-j) (1-p)^j` times the summed support of that class,
/// which works out to `C(n-1, j) p^(n-j) (1-p)^j`.
pub fn mean_decomposition<T: Scalar>(n: u32, p: &ProbValue<T>) -> Result<Vec<T>> {
    check_full_n::<T>(n)?;
    let sizes = jump_sizes(n, p);
    let sums = index_sums_by_popcount(n);
    let size = T::from_u128(sample_size(n).into());
    Ok((0..n as usize)
        .map(|zeros| {
            let ones = n as usize - zeros;
            sizes[ones].clone() * T::from_u128(sums[ones]) / size.clone()
        })
        .collect())
}

/// Closed-form variance `sum_i 4^i / (2^n - 1)^2 * p (1 - p)`.
pub fn variance<T: Scalar>(n: u32, p: &ProbValue<T>) -> Result<T> {
    check_point_n(n)?;
    let size = T::from_u128(sample_size(n).into());
    Ok(T::from_u128(weaving_sum(n)) / (size.clone() * size) * bernoulli_variance(p))
}

/// Variance contributed by selection `i + 1` (bit `i`): `(2^i / (2^n - 1))^2 p (1 - p)`.
pub fn variance_per_bit<T: Scalar>(n: u32, p: &ProbValue<T>, bit: u32) -> Result<T> {
    check_point_n(n)?;
    if bit >= n {
        return Err(WeaverError::domain(format!(
            "bit index {bit} must be below n = {n}"
        )));
    }
    let step = T::from_u128(1u128 << bit) / T::from_u128(sample_size(n).into());
    Ok(step.clone() * step * bernoulli_variance(p))
}

/// `sigma^2(Y_n) / (p (1 - p)) = (4^n - 1) / (3 (2^n - 1)^2)`.
pub fn variance_ratio(n: u32) -> Result<Rational> {
    check_point_n(n)?;
    let size = u128::from(sample_size(n));
    Ok(Rational::new(weaving_sum(n).into(), (size * size).into()))
}

fn bernoulli_variance<T: Scalar>(p: &ProbValue<T>) -> T {
    p.value().clone() * p.complement().into_inner()
}
