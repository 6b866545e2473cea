//! Weaver's distribution `W(n, p)`.
//!
//! `W(n, p)` is the law of `Y_n = k / (2^n - 1)` where the bits of `k` are
//! independent Bernoulli(`p`) selections. The crate provides
//!
//! * exact (rational) and floating-point probability vectors, built three
//!   equivalent ways, with the CDF, moments and the geometric triangle
//!   ([`weaver_core`]);
//! * brute-force enumeration oracles ([`oracle`]);
//! * the limiting binomial measure on dyadic rationals ([`hem`]);
//! * progressive sampling from two populations and a reproducible Monte
//!   Carlo engine ([`process`]);
//! * a command-line front end ([`cli`]).

pub mod cli;
pub mod error;
pub mod hem;
pub mod oracle;
pub mod process;
pub mod scalar;
pub mod weaver_core;

pub use error::{Result, WeaverError};
pub use scalar::{NumericMode, ProbValue, Rational, Scalar};
