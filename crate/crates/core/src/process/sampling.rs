use crate::error::{Result, WeaverError};
use crate::scalar::{NeumaierSum, ProbValue};
use crate::weaver_core::{sample_size, ChoiceVector};

use super::component::{ComponentSpec, Population};
use super::rng::ReplicationStream;

/// Largest `n` for which a path is drawn.
pub const PATH_CAP: u32 = 30;

/// One progressive sample of `2^n - 1` observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    choices: ChoiceVector,
    observations: Vec<f64>,
    sums: PathSums,
}

impl SamplePath {
    pub fn n(&self) -> u32 {
        self.choices.n()
    }

    pub fn choices(&self) -> ChoiceVector {
        self.choices
    }

    /// Observations in sub-sample order: batch `i` occupies
    /// `[2^(i-1) - 1, 2^i - 1)`.
    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    /// `S_n`.
    pub fn raw_sum(&self) -> f64 {
        self.sums.total
    }

    /// `X_n = S_n / (2^n - 1)`.
    pub fn path_mean(&self) -> f64 {
        self.sums.path_mean(self.n())
    }

    /// `Y_n = E(X_n | B_n) = k / (2^n - 1)`.
    pub fn conditional_mean(&self) -> f64 {
        conditional_mean_of(self.choices)
    }

    /// Sample mean of one population's observations; `None` if it supplied none.
    pub fn stratum_mean(&self, population: Population) -> Option<f64> {
        self.sums.stratum_mean(population)
    }
}

/// Everything a replication needs from a path without keeping it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PathSums {
    pub choices: ChoiceVector,
    pub total: f64,
    sum0: f64,
    count0: u64,
    sum1: f64,
    count1: u64,
}

impl PathSums {
    pub fn path_mean(&self, n: u32) -> f64 {
        self.total / sample_size(n) as f64
    }

    pub fn stratum_mean(&self, population: Population) -> Option<f64> {
        let (sum, count) = match population {
            Population::H0 => (self.sum0, self.count0),
            Population::H1 => (self.sum1, self.count1),
        };
        (count > 0).then(|| sum / count as f64)
    }
}

pub(crate) fn conditional_mean_of(choices: ChoiceVector) -> f64 {
    choices.index() as f64 / sample_size(choices.n()) as f64
}

pub(crate) fn validate_inputs(
    n: u32,
    cap: u32,
    h0: &ComponentSpec,
    h1: &ComponentSpec,
) -> Result<()> {
    h0.validate_for(Population::H0)?;
    h1.validate_for(Population::H1)?;
    if n == 0 || n > cap {
        return Err(WeaverError::domain(format!("n = {n} outside 1..={cap}")));
    }
    Ok(())
}

/// Draws the `n` selections; selection `i` lands in bit `i - 1`.
pub(crate) fn draw_choices(n: u32, p: f64, stream: &mut ReplicationStream) -> ChoiceVector {
    let k = (0..n).fold(0u64, |acc, i| acc | (u64::from(stream.bernoulli(p)) << i));
    ChoiceVector::new(n, k).expect("n within cap")
}

/// Draws the selections, then every batch in order, handing each
/// observation to `sink`.
pub(crate) fn draw_path(
    n: u32,
    p: f64,
    h0: &ComponentSpec,
    h1: &ComponentSpec,
    stream: &mut ReplicationStream,
    mut sink: impl FnMut(f64),
) -> PathSums {
    let choices = draw_choices(n, p, stream);
    let mut total = NeumaierSum::default();
    let mut strata = [NeumaierSum::default(); 2];
    let mut counts = [0u64; 2];
    for i in 1..=n {
        let from_h1 = choices.selection(i);
        let source = if from_h1 { h1 } else { h0 };
        let batch = 1u64 << (i - 1);
        let slot = usize::from(from_h1);
        counts[slot] += batch;
        for _ in 0..batch {
            let x = source.draw(stream);
            total.add(x);
            strata[slot].add(x);
            sink(x);
        }
    }
    PathSums {
        choices,
        total: total.value(),
        sum0: strata[0].value(),
        count0: counts[0],
        sum1: strata[1].value(),
        count1: counts[1],
    }
}

/// Progressive sampling: `n` independent Bernoulli(`p`) selections, then
/// batch `i` of size `2^(i-1)` drawn wholly from the selected population.
pub fn progressive_sample(
    n: u32,
    p: &ProbValue<f64>,
    h0: &ComponentSpec,
    h1: &ComponentSpec,
    stream: &mut ReplicationStream,
) -> Result<SamplePath> {
    validate_inputs(n, PATH_CAP, h0, h1)?;
    let mut observations = Vec::with_capacity(sample_size(n) as usize);
    let sums = draw_path(n, *p.value(), h0, h1, stream, |x| observations.push(x));
    Ok(SamplePath {
        choices: sums.choices,
        observations,
        sums,
    })
}

pub(crate) fn mixture_draw_from(sums: &PathSums, stream: &mut ReplicationStream) -> f64 {
    let lambda = conditional_mean_of(sums.choices);
    let population = if stream.bernoulli(lambda) {
        Population::H1
    } else {
        Population::H0
    };
    sums.stratum_mean(population)
        .expect("a stratum is selected only with positive share")
}

/// Picks H1's stratum with probability equal to its share `k / (2^n - 1)`
/// of the path (a fresh draw) and returns that stratum's sample mean.
pub fn mixture_draw(path: &SamplePath, stream: &mut ReplicationStream) -> f64 {
    mixture_draw_from(&path.sums, stream)
}
