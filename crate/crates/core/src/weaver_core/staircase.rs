//! The distribution function `F_n` of `W(n, p)` and its jumps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Result, WeaverError};
use crate::scalar::{ProbValue, Rational, Scalar};

use super::{check_point_n, jump_sizes, sample_size};

/// `F_n(x) = P(Y_n <= x)` for any rational `x` in `[0, 1]`.
///
/// Right-continuous. Runs in `O(n)`: the mass of all indices `k <= K`
/// is accumulated bit by bit from the top, since every block of indices
/// sharing a prefix carries the prefix mass.
pub fn cdf_eval<T: Scalar>(n: u32, p: &ProbValue<T>, x: &Rational) -> Result<T> {
    check_point_n(n)?;
    if x.is_negative() || *x > Rational::one() {
        return Err(WeaverError::domain(format!(
            "cdf argument {x} is outside [0, 1]"
        )));
    }
    let size = BigInt::from(sample_size(n));
    let last = (x.numer() * size)
        .div_floor(x.denom())
        .to_u64()
        .expect("floor(x (2^n - 1)) fits in u64 for x <= 1");

    let lo = p.complement().into_inner();
    let hi = p.value().clone();
    let mut prefix = T::one();
    let mut total = T::zero();
    for bit in (0..n).rev() {
        if last >> bit & 1 == 1 {
            total = total + prefix.clone() * lo.clone();
            prefix = prefix * hi.clone();
        } else {
            prefix = prefix * lo.clone();
        }
    }
    Ok(total + prefix)
}

/// One class of equal jumps of the staircase `F_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpClass<T> {
    pub size: T,
    pub count: u64,
}

/// Jump sizes `h_j = p^j (1-p)^(n-j)` with multiplicities `C(n, j)`,
/// ordered by `j`. Classes whose sizes coincide (every class when
/// `p = 1/2`, all `j >= 1` when `p = 0`) are merged into the first.
pub fn jump_histogram<T: Scalar>(n: u32, p: &ProbValue<T>) -> Result<Vec<JumpClass<T>>> {
    check_point_n(n)?;
    let mut classes: Vec<JumpClass<T>> = Vec::with_capacity(n as usize + 1);
    for (size, count) in jump_sizes(n, p).into_iter().zip(pascal_row(n)) {
        match classes.iter_mut().find(|c| c.size == size) {
            Some(class) => class.count += count,
            None => classes.push(JumpClass { size, count }),
        }
    }
    Ok(classes)
}

/// Row `n` of Pascal's triangle via `C(n, j) = C(n-1, j-1) + C(n-1, j)`.
fn pascal_row(n: u32) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(1);
        next.extend(row.windows(2).map(|w| w[0] + w[1]));
        next.push(1);
        row = next;
    }
    row
}
