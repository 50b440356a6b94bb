//! The generalized OneMax objective and evaluation accounting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Number of positions in which a candidate agrees with the hidden target.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FitnessValue(pub usize);

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A black-box objective the algorithms may query.
///
/// Every query is charged: implementations must count each call to
/// [`Objective::evaluate`], duplicates included.
pub trait Objective {
    type Value: Copy + Ord + fmt::Debug;

    /// Length of the bit strings this objective accepts.
    fn dimension(&self) -> usize;

    fn evaluate(&mut self, x: &BitString) -> Result<Self::Value>;

    /// Queries charged so far.
    fn evaluations(&self) -> u64;

    fn is_optimal(&self, value: Self::Value) -> bool;

    /// Distance `n - OM(x)` recovered from an objective value, if the
    /// objective exposes absolute OneMax values. Comparison-based wrappers return `None`.
    fn distance_to_optimum(&self, _value: Self::Value) -> Option<usize> {
        None
    }
}

/// `OM_z(x) = |{i : x_i = z_i}|` for a hidden target `z`, with an evaluation counter.
#[derive(Clone, Debug)]
pub struct OneMaxInstance {
    target: BitString,
    evaluations: u64,
    best_seen: Option<FitnessValue>,
}

impl OneMaxInstance {
    pub fn new(target: BitString) -> Self {
        Self {
            target,
            evaluations: 0,
            best_seen: None,
        }
    }

    pub fn n(&self) -> usize {
        self.target.len()
    }

    pub fn target(&self) -> &BitString {
        &self.target
    }

    pub fn best_seen(&self) -> Option<FitnessValue> {
        self.best_seen
    }

    pub fn evaluate(&mut self, x: &BitString) -> Result<FitnessValue> {
        let agree = x.agreements(&self.target).map_err(|_| Error::DimensionMismatch {
            expected: self.target.len(),
            actual: x.len(),
        })?;
        let value = FitnessValue(agree);
        self.evaluations += 1;
        if self.best_seen.is_none_or(|b| value > b) {
            self.best_seen = Some(value);
        }
        Ok(value)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

impl Objective for OneMaxInstance {
    type Value = FitnessValue;

    fn dimension(&self) -> usize {
        self.n()
    }

    fn evaluate(&mut self, x: &BitString) -> Result<FitnessValue> {
        OneMaxInstance::evaluate(self, x)
    }

    fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn is_optimal(&self, value: FitnessValue) -> bool {
        value.0 == self.n()
    }

    fn distance_to_optimum(&self, value: FitnessValue) -> Option<usize> {
        Some(self.n() - value.0)
    }
}

/// `g ∘ OM_z` for a strictly increasing `g`.
///
/// Only order comparisons of the transformed values are meaningful, so the
/// fitness-dependent controller cannot run on it.
pub struct Transformed<G> {
    inner: OneMaxInstance,
    transform: G,
}

impl<G: Fn(usize) -> i64> Transformed<G> {
    pub fn new(inner: OneMaxInstance, transform: G) -> Self {
        Self { inner, transform }
    }

    pub fn inner(&self) -> &OneMaxInstance {
        &self.inner
    }
}

impl<G: Fn(usize) -> i64> Objective for Transformed<G> {
    type Value = i64;

    fn dimension(&self) -> usize {
        self.inner.n()
    }

    fn evaluate(&mut self, x: &BitString) -> Result<i64> {
        let v = self.inner.evaluate(x)?;
        Ok((self.transform)(v.0))
    }

    fn evaluations(&self) -> u64 {
        self.inner.evaluations()
    }

    fn is_optimal(&self, value: i64) -> bool {
        value == (self.transform)(self.inner.n())
    }
}
