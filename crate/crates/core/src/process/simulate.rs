use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WeaverError};
use crate::scalar::{pairwise_sum, Rational, POINT_EVAL_CAP};
use crate::weaver_core::sample_size;

use super::component::ComponentSpec;
use super::rng::ReplicationStream;
use super::sampling::{
    conditional_mean_of, draw_choices, draw_path, mixture_draw_from, validate_inputs, PATH_CAP,
};

/// Default cap on `reps * (2^n - 1)` drawn observations.
pub const DEFAULT_MAX_OBSERVATIONS: u64 = 4_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    /// The arithmetic mean of all `2^n - 1` observations.
    PathMean,
    /// A stratum picked with probability equal to its share, then its mean.
    MixtureDraw,
    /// `Y_n = k / (2^n - 1)`; no observations are drawn.
    ConditionalMean,
}

impl ProcessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcessKind::PathMean => "path_mean",
            ProcessKind::MixtureDraw => "mixture_draw",
            ProcessKind::ConditionalMean => "conditional_mean",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProcessKind {
    type Err = WeaverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pathmean" | "path_mean" => Ok(ProcessKind::PathMean),
            "mixdraw" | "mixture_draw" => Ok(ProcessKind::MixtureDraw),
            "condmean" | "conditional_mean" => Ok(ProcessKind::ConditionalMean),
            other => Err(WeaverError::validation(format!(
                "unknown process {other:?} (expected pathmean, mixdraw or condmean)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub process: ProcessKind,
    pub n: u32,
    pub p: f64,
    pub h0: ComponentSpec,
    pub h1: ComponentSpec,
    pub replications: u64,
    pub master_seed: u64,
    /// Half-width of the windows around 0 and 1 for the endpoint fractions.
    pub epsilon: f64,
    pub max_observations: u64,
}

impl SimulationConfig {
    /// Point masses at 0 and 1, `epsilon = 0.05`, default observation cap.
    pub fn new(process: ProcessKind, n: u32, p: f64, replications: u64, master_seed: u64) -> Self {
        SimulationConfig {
            process,
            n,
            p,
            h0: ComponentSpec::point(Rational::from_integer(0.into())).expect("valid"),
            h1: ComponentSpec::point(Rational::from_integer(1.into())).expect("valid"),
            replications,
            master_seed,
            epsilon: 0.05,
            max_observations: DEFAULT_MAX_OBSERVATIONS,
        }
    }

    pub fn with_components(mut self, h0: ComponentSpec, h1: ComponentSpec) -> Self {
        self.h0 = h0;
        self.h1 = h1;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(WeaverError::validation("replication count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(WeaverError::domain(format!(
                "probability {} is outside [0, 1]",
                self.p
            )));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(WeaverError::validation(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        let cap = match self.process {
            ProcessKind::ConditionalMean => POINT_EVAL_CAP,
            _ => PATH_CAP,
        };
        validate_inputs(self.n, cap, &self.h0, &self.h1)?;
        if self.process != ProcessKind::ConditionalMean {
            let budget = self.replications.checked_mul(sample_size(self.n));
            if budget.is_none_or(|b| b > self.max_observations) {
                return Err(WeaverError::resource(format!(
                    "{} replications of 2^{} - 1 observations exceed the cap of {} observations",
                    self.replications, self.n, self.max_observations
                )));
            }
        }
        Ok(())
    }
}

/// Summary of a simulation run. Field names are the JSON wire format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub process: ProcessKind,
    pub n: u32,
    pub p: f64,
    pub reps: u64,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub frac_near_zero: f64,
    pub frac_near_one: f64,
    pub epsilon: f64,
}

fn one_replication(config: &SimulationConfig, replication: u64) -> f64 {
    let mut stream = ReplicationStream::new(config.master_seed, replication);
    match config.process {
        ProcessKind::ConditionalMean => {
            conditional_mean_of(draw_choices(config.n, config.p, &mut stream))
        }
        ProcessKind::PathMean => {
            draw_path(config.n, config.p, &config.h0, &config.h1, &mut stream, |_| {})
                .path_mean(config.n)
        }
        ProcessKind::MixtureDraw => {
            let sums = draw_path(config.n, config.p, &config.h0, &config.h1, &mut stream, |_| {});
            mixture_draw_from(&sums, &mut stream)
        }
    }
}

/// Per-replication values in replication order, computed on the current
/// rayon pool.
pub fn replicate(config: &SimulationConfig) -> Result<Vec<f64>> {
    config.validate()?;
    Ok((0..config.replications)
        .into_par_iter()
        .map(|r| one_replication(config, r))
        .collect())
}

/// Moments and endpoint fractions of the per-replication values.
pub fn summarize(config: &SimulationConfig, values: &[f64]) -> SimulationReport {
    let reps = values.len() as f64;
    let mean = pairwise_sum(values) / reps;
    let squares: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let (variance, se_mean, se_variance) = if values.len() < 2 {
        (0.0, 0.0, 0.0)
    } else {
        let variance = pairwise_sum(&squares) / (reps - 1.0);
        let fourths: Vec<f64> = squares.iter().map(|s| s * s).collect();
        let m4 = pairwise_sum(&fourths) / reps;
        // Var(s^2) ~ (m4 - sigma^4 (R - 3) / (R - 1)) / R
        let var_of_var = (m4 - variance * variance * (reps - 3.0) / (reps - 1.0)) / reps;
        (variance, (variance / reps).sqrt(), var_of_var.max(0.0).sqrt())
    };
    let near = |target: f64| {
        values
            .iter()
            .filter(|x| (*x - target).abs() <= config.epsilon)
            .count() as f64
            / reps
    };
    SimulationReport {
        process: config.process,
        n: config.n,
        p: config.p,
        reps: config.replications,
        seed: config.master_seed,
        mean,
        variance,
        se_mean,
        se_variance,
        frac_near_zero: near(0.0),
        frac_near_one: near(1.0),
        epsilon: config.epsilon,
    }
}

/// Runs the configured process on rayon's global pool.
pub fn simulate(config: &SimulationConfig) -> Result<SimulationReport> {
    let values = replicate(config)?;
    Ok(summarize(config, &values))
}

/// Runs on a dedicated pool of `threads` workers (0 = rayon's default).
/// The report does not depend on `threads`.
pub fn simulate_with_threads(config: &SimulationConfig, threads: usize) -> Result<SimulationReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| WeaverError::resource(format!("cannot start worker pool: {e}")))?;
    pool.install(|| simulate(config))
}
