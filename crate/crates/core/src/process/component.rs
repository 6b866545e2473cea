//! Populations the progressive sampler draws from.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Result, WeaverError};
use crate::scalar::{parse_rational, Rational, Scalar};

use super::rng::ReplicationStream;

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    /// All mass at `value`.
    Point { value: Rational },
    /// `high` with probability `weight`, otherwise `low`.
    TwoPoint {
        low: Rational,
        high: Rational,
        weight: Rational,
    },
    /// Continuous uniform on `[low, high]`.
    Uniform { low: Rational, high: Rational },
}

impl ComponentKind {
    fn moments(&self) -> (Rational, Rational) {
        let two = Rational::from_integer(2.into());
        match self {
            ComponentKind::Point { value } => (value.clone(), Rational::zero()),
            ComponentKind::TwoPoint { low, high, weight } => {
                let spread = high - low;
                let mean = low + weight * &spread;
                let variance = weight * (Rational::one() - weight) * &spread * &spread;
                (mean, variance)
            }
            ComponentKind::Uniform { low, high } => {
                let width = high - low;
                let twelve = Rational::from_integer(12.into());
                ((low + high) / two, &width * &width / twelve)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ComponentKind::Point { .. } => Ok(()),
            ComponentKind::TwoPoint { weight, .. } => {
                if weight.is_negative() || *weight > Rational::one() {
                    Err(WeaverError::validation(format!(
                        "twopoint weight {weight} is outside [0, 1]"
                    )))
                } else {
                    Ok(())
                }
            }
            ComponentKind::Uniform { low, high } => {
                if low < high {
                    Ok(())
                } else {
                    Err(WeaverError::validation(format!(
                        "uniform interval needs low < high, got [{low}, {high}]"
                    )))
                }
            }
        }
    }

    /// Image under `x -> (x - shift) / scale`.
    fn affine(&self, shift: &Rational, scale: &Rational) -> ComponentKind {
        let map = |x: &Rational| (x - shift) / scale;
        match self {
            ComponentKind::Point { value } => ComponentKind::Point { value: map(value) },
            ComponentKind::TwoPoint { low, high, weight } => ComponentKind::TwoPoint {
                low: map(low),
                high: map(high),
                weight: weight.clone(),
            },
            ComponentKind::Uniform { low, high } => {
                let (a, b) = (map(low), map(high));
                if a < b {
                    ComponentKind::Uniform { low: a, high: b }
                } else {
                    ComponentKind::Uniform { low: b, high: a }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Sampler {
    Point(f64),
    TwoPoint { low: f64, high: f64, weight: f64 },
    Uniform { low: f64, width: f64 },
}

/// Which population a component plays. The moments are normalized so that
/// H0 has mean 0 and H1 has mean 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    H0,
    H1,
}

impl Population {
    fn required_mean(self) -> Rational {
        match self {
            Population::H0 => Rational::zero(),
            Population::H1 => Rational::one(),
        }
    }
}

/// A population with exact mean and variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    kind: ComponentKind,
    mean: Rational,
    variance: Rational,
    sampler: Sampler,
}

impl ComponentSpec {
    pub fn new(kind: ComponentKind) -> Result<Self> {
        kind.validate()?;
        let (mean, variance) = kind.moments();
        let f = |x: &Rational| f64::from_rational(x);
        let sampler = match &kind {
            ComponentKind::Point { value } => Sampler::Point(f(value)),
            ComponentKind::TwoPoint { low, high, weight } => Sampler::TwoPoint {
                low: f(low),
                high: f(high),
                weight: f(weight),
            },
            ComponentKind::Uniform { low, high } => Sampler::Uniform {
                low: f(low),
                width: f(&(high - low)),
            },
        };
        Ok(ComponentSpec {
            kind,
            mean,
            variance,
            sampler,
        })
    }

    /// Builds the component and checks the caller's declared moments against it.
    pub fn with_declared(kind: ComponentKind, mean: &Rational, variance: &Rational) -> Result<Self> {
        let spec = ComponentSpec::new(kind)?;
        if spec.mean != *mean || spec.variance != *variance {
            return Err(WeaverError::validation(format!(
                "declared moments ({mean}, {variance}) do not match {spec} with ({}, {})",
                spec.mean, spec.variance
            )));
        }
        Ok(spec)
    }

    pub fn point(value: Rational) -> Result<Self> {
        ComponentSpec::new(ComponentKind::Point { value })
    }

    pub fn two_point(low: Rational, high: Rational, weight: Rational) -> Result<Self> {
        ComponentSpec::new(ComponentKind::TwoPoint { low, high, weight })
    }

    pub fn uniform(low: Rational, high: Rational) -> Result<Self> {
        ComponentSpec::new(ComponentKind::Uniform { low, high })
    }

    pub fn kind(&self) -> &ComponentKind {
        &self.kind
    }

    pub fn mean(&self) -> &Rational {
        &self.mean
    }

    pub fn variance(&self) -> &Rational {
        &self.variance
    }

    /// Smallest and largest values a draw can take.
    pub fn support_bounds(&self) -> (f64, f64) {
        match self.sampler {
            Sampler::Point(c) => (c, c),
            Sampler::TwoPoint { low, high, .. } => (low.min(high), low.max(high)),
            Sampler::Uniform { low, width } => (low, low + width),
        }
    }

    pub fn validate_for(&self, role: Population) -> Result<()> {
        let want = role.required_mean();
        if self.mean != want {
            return Err(WeaverError::validation(format!(
                "{role:?} must have mean {want}, but {self} has mean {}",
                self.mean
            )));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn draw(&self, stream: &mut ReplicationStream) -> f64 {
        match self.sampler {
            Sampler::Point(c) => c,
            Sampler::TwoPoint { low, high, weight } => {
                if stream.bernoulli(weight) {
                    high
                } else {
                    low
                }
            }
            Sampler::Uniform { low, width } => low + width * stream.uniform(),
        }
    }
}

impl fmt::Display for ComponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ComponentKind::Point { value } => write!(f, "point:{value}"),
            ComponentKind::TwoPoint { low, high, weight } => {
                write!(f, "twopoint:{low},{high},{weight}")
            }
            ComponentKind::Uniform { low, high } => write!(f, "uniform:{low},{high}"),
        }
    }
}

/// Grammar: `point:c`, `twopoint:x0,x1,q`, `uniform:a,b`; numbers as in
/// [`parse_rational`].
impl FromStr for ComponentSpec {
    type Err = WeaverError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').ok_or_else(|| {
            WeaverError::validation(format!("component {s:?} is missing ':' (e.g. point:0)"))
        })?;
        let values = args
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        let arity = |want: usize| {
            if values.len() == want {
                Ok(())
            } else {
                Err(WeaverError::validation(format!(
                    "component {name:?} takes {want} parameter(s), got {}",
                    values.len()
                )))
            }
        };
        let mut it = values.iter().cloned();
        match name {
            "point" => {
                arity(1)?;
                ComponentSpec::point(it.next().unwrap())
            }
            "twopoint" => {
                arity(3)?;
                ComponentSpec::two_point(it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
            }
            "uniform" => {
                arity(2)?;
                ComponentSpec::uniform(it.next().unwrap(), it.next().unwrap())
            }
            other => Err(WeaverError::validation(format!(
                "unknown component kind {other:?} (expected point, twopoint or uniform)"
            ))),
        }
    }
}

/// Maps a pair with means `mu0 != mu1` onto means 0 and 1 by
/// `x -> (x - mu0) / (mu1 - mu0)`; variances scale by `1 / (mu1 - mu0)^2`.
pub fn standardize(h0: &ComponentSpec, h1: &ComponentSpec) -> Result<(ComponentSpec, ComponentSpec)> {
    let shift = h0.mean.clone();
    let scale = &h1.mean - &h0.mean;
    if scale.is_zero() {
        return Err(WeaverError::validation(
            "cannot standardize populations with equal means",
        ));
    }
    Ok((
        ComponentSpec::new(h0.kind.affine(&shift, &scale))?,
        ComponentSpec::new(h1.kind.affine(&shift, &scale))?,
    ))
}
