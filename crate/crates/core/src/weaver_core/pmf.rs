use std::str::FromStr;

use crate::error::{Result, WeaverError};
use crate::scalar::{ProbValue, Rational, Scalar};

use super::{check_full_n, check_index, check_point_n, sample_size};

/// How a mass vector is built. All three give the same vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    /// `p^#1 (1-p)^#0` evaluated per index.
    Direct,
    /// Global weaving: `v <- ((1-p) v, p v)` starting from `v = (1)`.
    Weave,
    /// Local forking: every entry splits into adjacent children
    /// `((1-p) e, p e)`, then indices are bit-reversed back to selection order.
    Cascade,
}

impl Construction {
    pub const ALL: [Construction; 3] =
        [Construction::Direct, Construction::Weave, Construction::Cascade];

    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Direct => "direct",
            Construction::Weave => "weave",
            Construction::Cascade => "cascade",
        }
    }
}

impl FromStr for Construction {
    type Err = WeaverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Construction::Direct),
            "weave" => Ok(Construction::Weave),
            "cascade" => Ok(Construction::Cascade),
            other => Err(WeaverError::validation(format!(
                "unknown method {other:?} (expected direct, weave or cascade)"
            ))),
        }
    }
}

/// `h_j = p^j (1-p)^(n-j)` for `j = 0..=n`: the only values a mass can take.
pub fn jump_sizes<T: Scalar>(n: u32, p: &ProbValue<T>) -> Vec<T> {
    let q = p.complement();
    (0..=n)
        .map(|j| p.value().powu(j) * q.value().powu(n - j))
        .collect()
}

/// Mass of the support point with index `k`.
pub fn pmf_point<T: Scalar>(n: u32, p: &ProbValue<T>, k: u64) -> Result<T> {
    check_point_n(n)?;
    check_index(n, k)?;
    let ones = k.count_ones();
    Ok(p.value().powu(ones) * p.complement().value().powu(n - ones))
}

/// Full mass vector of `W(n, p)`.
pub fn pmf_vector<T: Scalar>(
    n: u32,
    p: &ProbValue<T>,
    method: Construction,
) -> Result<WeaverDistribution<T>> {
    check_full_n::<T>(n)?;
    let probs = match method {
        Construction::Direct => direct(n, p),
        Construction::Weave => weave(n, p),
        Construction::Cascade => cascade(n, p),
    };
    Ok(WeaverDistribution {
        n,
        p: p.clone(),
        probs,
        method,
    })
}

fn direct<T: Scalar>(n: u32, p: &ProbValue<T>) -> Vec<T> {
    let sizes = jump_sizes(n, p);
    (0..1u64 << n)
        .map(|k| sizes[k.count_ones() as usize].clone())
        .collect()
}

fn weave<T: Scalar>(n: u32, p: &ProbValue<T>) -> Vec<T> {
    let (lo, hi) = (p.complement().into_inner(), p.value().clone());
    let mut v = Vec::with_capacity(1 << n);
    v.push(T::one());
    for _ in 0..n {
        let len = v.len();
        v.extend_from_within(..);
        for x in &mut v[..len] {
            *x = lo.clone() * x.clone();
        }
        for x in &mut v[len..] {
            *x = hi.clone() * x.clone();
        }
    }
    v
}

fn forked_rows<T: Scalar>(n: u32, p: &ProbValue<T>) -> Vec<T> {
    let (lo, hi) = (p.complement().into_inner(), p.value().clone());
    let mut row = vec![T::one()];
    for _ in 0..n {
        row = row
            .into_iter()
            .flat_map(|e| [lo.clone() * e.clone(), hi.clone() * e])
            .collect();
    }
    row
}

fn cascade<T: Scalar>(n: u32, p: &ProbValue<T>) -> Vec<T> {
    let row = forked_rows(n, p);
    // After n forks the first fork sits in the top bit; selection order
    // wants it in the bottom bit.
    let mut out = row.clone();
    for (idx, mass) in row.into_iter().enumerate() {
        out[reverse_bits(idx as u64, n) as usize] = mass;
    }
    out
}

fn reverse_bits(k: u64, n: u32) -> u64 {
    if n == 0 {
        0
    } else {
        k.reverse_bits() >> (64 - n)
    }
}

/// The mass vector of `W(n, p)` on the support `y_k = k / (2^n - 1)`.
///
/// Immutable once built; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct WeaverDistribution<T: Scalar> {
    n: u32,
    p: ProbValue<T>,
    probs: Vec<T>,
    method: Construction,
}

impl<T: Scalar> WeaverDistribution<T> {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> &ProbValue<T> {
        &self.p
    }

    pub fn method(&self) -> Construction {
        self.method
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, k: u64) -> Option<&T> {
        self.probs.get(k as usize)
    }

    /// Support point `y_k` as a scalar of the distribution's mode.
    pub fn support(&self, k: u64) -> T {
        T::from_u128(k.into()) / T::from_u128(sample_size(self.n).into())
    }

    pub fn total_mass(&self) -> T {
        T::sum_all(self.probs.iter().cloned())
    }

    /// `E Y_n` by summation over the support.
    pub fn mean(&self) -> T {
        let weighted = T::sum_all(
            self.probs
                .iter()
                .enumerate()
                .map(|(k, m)| m.clone() * T::from_u128(k as u128)),
        );
        weighted / T::from_u128(sample_size(self.n).into())
    }

    /// `E Y_n^j` by summation over the support.
    pub fn raw_moment(&self, j: u32) -> T {
        let weighted = T::sum_all(
            self.probs
                .iter()
                .enumerate()
                .map(|(k, m)| m.clone() * T::from_u128(k as u128).powu(j)),
        );
        weighted / T::from_u128(sample_size(self.n).into()).powu(j)
    }

    /// Central second moment by summation over the support.
    pub fn variance(&self) -> T {
        let mean = self.mean();
        T::sum_all(self.probs.iter().enumerate().map(|(k, m)| {
            let d = self.support(k as u64) - mean.clone();
            m.clone() * d.clone() * d
        }))
    }

    /// `F_n(y_k)` for every `k` (the staircase heights).
    pub fn cumulative(&self) -> Vec<T> {
        let mut acc = T::zero();
        self.probs
            .iter()
            .map(|m| {
                acc = acc.clone() + m.clone();
                acc.clone()
            })
            .collect()
    }

    /// All indices attaining the largest mass. With `p = 1/2` every index ties.
    pub fn modes(&self) -> Vec<u64> {
        let Some(max) = self
            .probs
            .iter()
            .max_by(|a, b| a.partial_cmp(b).expect("masses are ordered"))
        else {
            return Vec::new();
        };
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, m)| *m == max)
            .map(|(k, _)| k as u64)
            .collect()
    }
}

impl WeaverDistribution<Rational> {
    pub fn to_float(&self) -> WeaverDistribution<f64> {
        WeaverDistribution {
            n: self.n,
            p: self.p.to_float(),
            probs: self.probs.iter().map(f64::from_rational).collect(),
            method: self.method,
        }
    }
}

/// Mirror image about `y = 1/2`: the distribution `W(n, 1 - p)`.
pub fn reflect<T: Scalar>(dist: &WeaverDistribution<T>) -> WeaverDistribution<T> {
    let mut probs = dist.probs.clone();
    probs.reverse();
    WeaverDistribution {
        n: dist.n,
        p: dist.p.complement(),
        probs,
        method: dist.method,
    }
}
