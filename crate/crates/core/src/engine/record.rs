use serde::Serialize;

use crate::bitstring::BitString;
use crate::onemax::FitnessValue;

/// One row of a run trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord<V = FitnessValue> {
    pub iter: u64,
    pub lambda_real: f64,
    pub lambda_int: usize,
    pub ell: usize,
    pub fitness_before: V,
    pub fitness_after: V,
    /// Strict fitness increase.
    pub success: bool,
    pub evals_cum: u64,
}

#[derive(Clone, Debug)]
pub struct RunResult<V = FitnessValue> {
    pub total_evals: u64,
    pub total_iters: u64,
    pub found_optimum: bool,
    pub final_value: V,
    /// Empty unless tracing was requested.
    pub trace: Vec<IterationRecord<V>>,
    /// Incumbent after each iteration; empty unless requested.
    pub points: Vec<BitString>,
    /// Iterations started with λ at the upper barrier `n`.
    pub iters_at_cap: u64,
    pub seed: u64,
}

impl<V> RunResult<V> {
    /// Fraction of iterations spent with λ = n.
    pub fn cap_occupancy(&self) -> f64 {
        if self.total_iters == 0 {
            0.0
        } else {
            self.iters_at_cap as f64 / self.total_iters as f64
        }
    }
}

/// What a run keeps besides its summary numbers.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Recording {
    pub trace: bool,
    pub points: bool,
}

impl Recording {
    pub const NONE: Self = Self {
        trace: false,
        points: false,
    };
    pub const TRACE: Self = Self {
        trace: true,
        points: false,
    };
    pub const ALL: Self = Self {
        trace: true,
        points: true,
    };
}
