//! Closed-form moments of the two sampled processes.

use num_traits::Zero;

use crate::error::{Result, WeaverError};
use crate::scalar::{ProbValue, Scalar, POINT_EVAL_CAP};
use crate::weaver_core::{self, mixing_sum, sample_size, weaving_sum};

fn check(n: u32, s0: &impl Scalar, s1: &impl Scalar) -> Result<()> {
    if n == 0 || n > POINT_EVAL_CAP {
        return Err(WeaverError::domain(format!("n = {n} outside 1..={POINT_EVAL_CAP}")));
    }
    if !(*s0 >= Zero::zero() && *s1 >= Zero::zero()) {
        return Err(WeaverError::domain("population variances must be nonnegative"));
    }
    Ok(())
}

fn size<T: Scalar>(n: u32) -> T {
    T::from_u128(sample_size(n).into())
}

/// `p (1 - p) + (s0 + s1) / (2^n - 1)`.
///
/// This is the variance of the mixture-draw process when both strata are
/// non-empty; see [`mixture_draw_variance_exact`] for the endpoint terms.
pub fn theoretical_variance_mixture<T: Scalar>(
    n: u32,
    p: &ProbValue<T>,
    s0: &T,
    s1: &T,
) -> Result<T> {
    check(n, s0, s1)?;
    let pq = p.value().clone() * p.complement().into_inner();
    Ok(pq + (s0.clone() + s1.clone()) / size(n))
}

/// Variance of the literal path mean:
/// `Var(Y_n) + ((1 - p) s0 + p s1) / (2^n - 1)`.
pub fn theoretical_variance_pathmean<T: Scalar>(
    n: u32,
    p: &ProbValue<T>,
    s0: &T,
    s1: &T,
) -> Result<T> {
    check(n, s0, s1)?;
    let within = p.complement().into_inner() * s0.clone() + p.value().clone() * s1.clone();
    Ok(weaver_core::variance(n, p)? + within / size(n))
}

/// Exact variance of the mixture-draw process, including the two choice
/// vectors where one stratum is empty. At `k = 0` only H0's mean of
/// `2^n - 1` draws can be returned, so its conditional variance is
/// `s0 / (2^n - 1)` rather than `(s0 + s1) / (2^n - 1)`; symmetrically at
/// `k = 2^n - 1`. Hence
/// `p(1-p) + (s0 + s1 - (1-p)^n s1 - p^n s0) / (2^n - 1)`.
pub fn mixture_draw_variance_exact<T: Scalar>(
    n: u32,
    p: &ProbValue<T>,
    s0: &T,
    s1: &T,
) -> Result<T> {
    let nominal = theoretical_variance_mixture(n, p, s0, s1)?;
    let all_h0 = p.complement().value().powu(n);
    let all_h1 = p.value().powu(n);
    Ok(nominal - (all_h0 * s1.clone() + all_h1 * s0.clone()) / size(n))
}

/// The three variance components of the mixture-draw process.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceDecomposition<T> {
    /// `sum 4^i / (2^n - 1)^2 * p (1 - p)`, the variance of `Y_n`.
    pub between_weaving: T,
    /// `sum 2^j (2^n - 1 - 2^j) / (2^n - 1)^2 * p (1 - p)`.
    pub mixing: T,
    /// `(s0 + s1) / (2^n - 1)`.
    pub within: T,
}

impl<T: Scalar> VarianceDecomposition<T> {
    pub fn total(&self) -> T {
        self.between_weaving.clone() + self.mixing.clone() + self.within.clone()
    }
}

pub fn variance_decomposition<T: Scalar>(
    n: u32,
    p: &ProbValue<T>,
    s0: &T,
    s1: &T,
) -> Result<VarianceDecomposition<T>> {
    check(n, s0, s1)?;
    let pq = p.value().clone() * p.complement().into_inner();
    let squared: T = size::<T>(n) * size(n);
    Ok(VarianceDecomposition {
        between_weaving: T::from_u128(weaving_sum(n)) / squared.clone() * pq.clone(),
        mixing: T::from_u128(mixing_sum(n)) / squared * pq,
        within: (s0.clone() + s1.clone()) / size(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn mixture_formula() {
        let p = ProbValue::ratio(2, 5).unwrap();
        let zero = q(0, 1);
        assert_eq!(theoretical_variance_mixture(5, &p, &zero, &zero).unwrap(), q(6, 25));
        assert_eq!(
            theoretical_variance_mixture(1, &p, &q(1, 2), &q(1, 3)).unwrap(),
            q(6, 25) + q(5, 6)
        );
        let pf = ProbValue::float(0.3).unwrap();
        let v = theoretical_variance_mixture(8, &pf, &1.0, &1.0).unwrap();
        assert!((v - (0.21 + 2.0 / 255.0)).abs() < 1e-15);
        assert!(theoretical_variance_mixture(3, &p, &q(-1, 1), &zero).is_err());
    }

    #[test]
    fn pathmean_formula() {
        let half = ProbValue::ratio(1, 2).unwrap();
        let zero = q(0, 1);
        assert_eq!(theoretical_variance_pathmean(2, &half, &zero, &zero).unwrap(), q(5, 36));
        let p = ProbValue::ratio(1, 3).unwrap();
        for n in 1..8 {
            assert_eq!(
                theoretical_variance_pathmean(n, &p, &zero, &zero).unwrap(),
                weaver_core::variance(n, &p).unwrap()
            );
        }
    }

    #[test]
    fn decomposition_rows() {
        let p = ProbValue::ratio(1, 2).unwrap();
        let zero = q(0, 1);
        let d = variance_decomposition(3, &p, &zero, &zero).unwrap();
        assert_eq!(d.between_weaving, q(21, 196));
        assert_eq!(d.mixing, q(28, 196));
        assert_eq!(d.total(), q(1, 4));
        let d = variance_decomposition(1, &p, &q(1, 1), &q(2, 1)).unwrap();
        assert_eq!((d.between_weaving, d.mixing, d.within), (q(1, 4), q(0, 1), q(3, 1)));
        let d = variance_decomposition(2, &p, &zero, &zero).unwrap();
        assert_eq!(d.between_weaving / q(1, 4), q(5, 9));
        assert_eq!(d.mixing / q(1, 4), q(4, 9));
    }

    #[test]
    fn exact_mixture_variance_differs_only_at_endpoints() {
        let p = ProbValue::ratio(1, 3).unwrap();
        let zero = q(0, 1);
        assert_eq!(
            mixture_draw_variance_exact(4, &p, &zero, &zero).unwrap(),
            theoretical_variance_mixture(4, &p, &zero, &zero).unwrap()
        );
        let one = q(1, 1);
        let gap = theoretical_variance_mixture(4, &p, &one, &one).unwrap()
            - mixture_draw_variance_exact(4, &p, &one, &one).unwrap();
        assert_eq!(gap, (q(16, 81) + q(1, 81)) / q(15, 1));
    }
}
