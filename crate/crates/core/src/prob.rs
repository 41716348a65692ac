//! Independence-based combinators.
//!
//! Every score in the engine is assembled from these: conjunction is a
//! product, disjunction and existence are noisy-OR, universal quantification
//! is a product and counts are expectations. Products of complements are
//! accumulated directly rather than in log space; stored values are pruned
//! far above the range where underflow matters.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A real number in `[0, 1]`. NaN is rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::OutOfRange(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn p_and(a: Probability, b: Probability) -> Probability {
    Probability(a.0 * b.0)
}

pub fn p_or(a: Probability, b: Probability) -> Probability {
    Probability(1.0 - (1.0 - a.0) * (1.0 - b.0))
}

pub fn p_not(a: Probability) -> Probability {
    Probability(1.0 - a.0)
}

/// `1 - Π(1 - p)`; the empty sequence gives 0.
pub fn p_exists<I>(probabilities: I) -> Probability
where
    I: IntoIterator<Item = Probability>,
{
    let mut acc = NoisyOr::new();
    for p in probabilities {
        acc.absorb(p.0);
    }
    acc.probability()
}

/// `Π p`; the empty sequence gives 1.
pub fn p_forall<I>(probabilities: I) -> Probability
where
    I: IntoIterator<Item = Probability>,
{
    Probability(probabilities.into_iter().map(|p| p.0).product())
}

/// Expected number of true events: `Σ p`.
pub fn expected_count<I>(probabilities: I) -> f64
where
    I: IntoIterator<Item = Probability>,
{
    probabilities.into_iter().map(|p| p.0).sum()
}

/// Checked noisy-OR over raw values; fails on the first out-of-range element.
pub fn try_exists<I>(values: I) -> Result<Probability>
where
    I: IntoIterator<Item = f64>,
{
    let mut acc = NoisyOr::new();
    for v in values {
        acc.absorb(Probability::new(v)?.0);
    }
    Ok(acc.probability())
}

/// Checked product over raw values.
pub fn try_forall<I>(values: I) -> Result<Probability>
where
    I: IntoIterator<Item = f64>,
{
    let mut prod = 1.0;
    for v in values {
        prod *= Probability::new(v)?.0;
    }
    Ok(Probability(prod))
}

/// Streaming accumulator for `1 - Π(1 - p)`.
///
/// Holds the running complement product so callers never materialize the
/// factor list. `absorb_factor` multiplies an arbitrary complement factor in,
/// for formulas whose factors are already of the form `(1 - w·p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyOr {
    complement: f64,
}

impl Default for NoisyOr {
    fn default() -> Self {
        Self::new()
    }
}

impl NoisyOr {
    #[inline]
    pub fn new() -> Self {
        NoisyOr { complement: 1.0 }
    }

    #[inline]
    pub fn absorb(&mut self, p: f64) {
        debug_assert!((0.0..=1.0).contains(&p), "probability {p} out of range");
        self.complement *= 1.0 - p;
    }

    #[inline]
    pub fn absorb_factor(&mut self, factor: f64) {
        debug_assert!(
            (0.0..=1.0).contains(&factor),
            "factor {factor} out of range"
        );
        self.complement *= factor;
    }

    #[inline]
    pub fn complement(&self) -> f64 {
        self.complement
    }

    #[inline]
    pub fn value(&self) -> f64 {
        1.0 - self.complement
    }

    pub fn probability(&self) -> Probability {
        Probability(self.value().clamp(0.0, 1.0))
    }
}
