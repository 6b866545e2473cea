//! Brute-force ground truth.
//!
//! Everything here walks all `2^n` choice vectors one bit at a time in
//! exact arithmetic and never calls the closed forms or constructions in
//! [`crate::weaver_core`]. Exact mode only.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Result, WeaverError};
use crate::scalar::{ProbValue, Rational};
use crate::weaver_core::ChoiceVector;

/// Largest `n` the enumeration accepts.
pub const ENUMERATION_CAP: u32 = 20;

/// Largest `n` accepted by [`square_split`].
pub const SQUARE_SPLIT_CAP: u32 = 30;

/// One line of the table of `B_n`, `E(S_n | B_n)` and `Y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationRow {
    pub k: u64,
    pub bits: ChoiceVector,
    pub conditional_sum: u64,
    pub support: Rational,
    pub prob: Rational,
}

/// Streams the rows in order of `k` without materializing them.
pub fn enumerate_rows(
    n: u32,
    p: &ProbValue<Rational>,
) -> Result<impl Iterator<Item = EnumerationRow> + '_> {
    check_cap(n)?;
    let size = (1u64 << n) - 1;
    Ok((0..=size).map(move |k| {
        let bits = ChoiceVector::new(n, k).expect("k < 2^n");
        // batch i has 2^(i-1) observations, each with conditional mean b_{i-1}
        let conditional_sum: u64 = (1..=n)
            .filter(|&i| bits.selection(i))
            .map(|i| 1u64 << (i - 1))
            .sum();
        let mut prob = Rational::one();
        for i in 1..=n {
            prob *= if bits.selection(i) {
                p.value().clone()
            } else {
                Rational::one() - p.value()
            };
        }
        EnumerationRow {
            k,
            bits,
            conditional_sum,
            support: Rational::new(conditional_sum.into(), size.into()),
            prob,
        }
    }))
}

/// All `2^n` rows ordered by `k`.
pub fn enumerate(n: u32, p: &ProbValue<Rational>) -> Result<Vec<EnumerationRow>> {
    Ok(enumerate_rows(n, p)?.collect())
}

/// `E Y_n^j` by enumeration.
pub fn moment_oracle(n: u32, p: &ProbValue<Rational>, j: u32) -> Result<Rational> {
    if j == 0 {
        return Err(WeaverError::domain("moment order j must be at least 1"));
    }
    let mut total = Rational::zero();
    for row in enumerate_rows(n, p)? {
        total += row.prob * num_traits::pow(row.support, j as usize);
    }
    Ok(total)
}

/// `Var Y_n = E Y_n^2 - (E Y_n)^2` by enumeration.
pub fn variance_oracle(n: u32, p: &ProbValue<Rational>) -> Result<Rational> {
    let m1 = moment_oracle(n, p, 1)?;
    let m2 = moment_oracle(n, p, 2)?;
    Ok(m2 - m1.clone() * m1)
}

/// `sum_k p_k lambda_k (1 - lambda_k)` with `lambda_k = y_k`: the expected
/// between-stratum variance of a mixture draw, by enumeration.
pub fn mixing_term_oracle(n: u32, p: &ProbValue<Rational>) -> Result<Rational> {
    let mut total = Rational::zero();
    for row in enumerate_rows(n, p)? {
        let rest = Rational::one() - &row.support;
        total += row.prob * row.support * rest;
    }
    Ok(total)
}

/// Exact variance of the mixture-draw value when both populations are
/// point masses at 0 and 1: the draw is 1 with probability `lambda_k`.
pub fn mixture_point_variance_oracle(n: u32, p: &ProbValue<Rational>) -> Result<Rational> {
    let mut first = Rational::zero();
    let mut second = Rational::zero();
    for row in enumerate_rows(n, p)? {
        // value 1 w.p. lambda, 0 otherwise, so E[X | k] = E[X^2 | k] = lambda
        first += row.prob.clone() * &row.support;
        second += row.prob * row.support;
    }
    Ok(second - first.clone() * first)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareSplit {
    pub weaving_sum: BigUint,
    pub mixing_sum: BigUint,
    /// `(2^n - 1)^2`
    pub squared_size: BigUint,
    pub holds: bool,
}

/// Checks `sum 4^i + sum 2^j (2^n - 1 - 2^j) = (2^n - 1)^2` in big integers.
pub fn square_split(n: u32) -> Result<SquareSplit> {
    if n == 0 || n > SQUARE_SPLIT_CAP {
        return Err(WeaverError::domain(format!(
            "n = {n} outside 1..={SQUARE_SPLIT_CAP}"
        )));
    }
    let two = BigUint::from(2u8);
    let size = two.pow(n) - 1u8;
    let mut weaving_sum = BigUint::zero();
    let mut mixing_sum = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..n {
        weaving_sum += &power * &power;
        mixing_sum += &power * (&size - &power);
        power *= 2u8;
    }
    let squared_size = &size * &size;
    let holds = &weaving_sum + &mixing_sum == squared_size;
    Ok(SquareSplit {
        weaving_sum,
        mixing_sum,
        squared_size,
        holds,
    })
}

fn check_cap(n: u32) -> Result<()> {
    if n == 0 {
        return Err(WeaverError::domain("n must be at least 1"));
    }
    if n > ENUMERATION_CAP {
        return Err(WeaverError::resource(format!(
            "enumeration of 2^{n} rows exceeds the cap n <= {ENUMERATION_CAP}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn last_row_is_all_ones() {
        let p = ProbValue::ratio(2, 5).unwrap();
        let rows = enumerate(3, &p).unwrap();
        assert_eq!(rows.len(), 8);
        let last = rows.last().unwrap();
        assert_eq!(last.k, 7);
        assert_eq!(last.bits.bit_string(), "111");
        assert_eq!(last.conditional_sum, 7);
        assert_eq!(last.support, q(1, 1));
        assert_eq!(last.prob, q(8, 125));
        for row in &rows {
            assert_eq!(row.conditional_sum, row.k);
        }
    }

    #[test]
    fn degenerate_enumeration() {
        let rows = enumerate(1, &ProbValue::ratio(0, 1).unwrap()).unwrap();
        assert_eq!(rows[0].prob, q(1, 1));
        assert_eq!(rows[1].prob, q(0, 1));
    }

    #[test]
    fn enumeration_sums_to_one() {
        let p = ProbValue::ratio(2, 5).unwrap();
        let total: Rational = enumerate_rows(4, &p).unwrap().map(|r| r.prob).sum();
        assert_eq!(total, q(1, 1));
        assert!(matches!(enumerate(21, &p), Err(WeaverError::Resource(_))));
    }

    #[test]
    fn moment_examples() {
        let half = ProbValue::ratio(1, 2).unwrap();
        assert_eq!(moment_oracle(2, &half, 2).unwrap(), q(7, 18));
        assert_eq!(variance_oracle(2, &half).unwrap(), q(5, 36));
        let p = ProbValue::ratio(3, 7).unwrap();
        assert_eq!(moment_oracle(1, &p, 5).unwrap(), q(3, 7));
        for n in 1..=6 {
            assert_eq!(moment_oracle(n, &p, 1).unwrap(), q(3, 7));
        }
    }

    #[test]
    fn point_mixture_is_bernoulli() {
        let half = ProbValue::ratio(1, 2).unwrap();
        assert_eq!(mixture_point_variance_oracle(2, &half).unwrap(), q(1, 4));
        assert_eq!(mixing_term_oracle(2, &half).unwrap(), q(1, 9));
    }

    #[test]
    fn square_split_rows() {
        let row = |n| {
            let c = square_split(n).unwrap();
            (c.weaving_sum, c.mixing_sum, c.holds)
        };
        assert_eq!(row(1), (1u8.into(), 0u8.into(), true));
        assert_eq!(row(3), (21u8.into(), 28u8.into(), true));
        assert_eq!(row(6), (1365u32.into(), 2604u32.into(), true));
        assert!(square_split(31).is_err());
    }
}
