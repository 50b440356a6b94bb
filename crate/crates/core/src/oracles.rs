//! Monte-Carlo validators for per-iteration success probabilities.
//!
//! Each estimator splits its samples into a fixed number of chunks with
//! seeds drawn up front from the caller's stream, so results are identical
//! whether the chunks run sequentially or in parallel.

use rand::Rng;
use serde::Serialize;

use crate::bitstring::BitString;
use crate::engine::{ga_iteration, lambda_star, Incumbent, IterationStatus, Workspace};
use crate::error::{Error, Result};
use crate::onemax::OneMaxInstance;
use crate::parallel::{map_indexed, Execution};
use crate::rng::stream;
use crate::variation::{CrossoverPlan, Mutator};

const CHUNKS: usize = 32;
const MIN_ITERATION_SAMPLES: u64 = 1000;

/// A Bernoulli proportion with Wald 3σ bounds.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub samples: u64,
    pub std_error: f64,
    pub lower_3sigma: f64,
    pub upper_3sigma: f64,
}

impl EstimateReport {
    pub fn from_counts(successes: u64, samples: u64) -> Self {
        assert!(samples > 0 && successes <= samples);
        let estimate = successes as f64 / samples as f64;
        let std_error = (estimate * (1.0 - estimate) / samples as f64).sqrt();
        Self {
            estimate,
            samples,
            std_error,
            lower_3sigma: estimate - 3.0 * std_error,
            upper_3sigma: estimate + 3.0 * std_error,
        }
    }
}

/// An empirical frequency next to the analytic lower bound it should respect.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub empirical: EstimateReport,
    pub analytic_bound: f64,
}

impl BoundCheck {
    /// One-sided: the empirical frequency is not below the bound by more than 3σ.
    pub fn holds(&self) -> bool {
        self.empirical.upper_3sigma >= self.analytic_bound
    }
}

/// A search state at fitness distance `distance` with offspring count `lambda`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct StateSpec {
    pub n: usize,
    pub distance: usize,
    pub lambda: usize,
    /// `C₀` when λ was derived as `C₀ · λ*`.
    pub multiplier: Option<f64>,
}

impl StateSpec {
    pub fn new(n: usize, distance: usize, lambda: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyBitString);
        }
        if distance > n {
            return Err(Error::InvalidParameter(format!("distance {distance} exceeds n = {n}")));
        }
        if lambda == 0 || lambda > n {
            return Err(Error::InvalidParameter(format!("λ must lie in [1, {n}], got {lambda}")));
        }
        Ok(Self {
            n,
            distance,
            lambda,
            multiplier: None,
        })
    }

    /// λ = `C₀ · ⌈√(n/d)⌉`, rounded and capped at `n`.
    pub fn with_multiplier(n: usize, distance: usize, multiplier: f64) -> Result<Self> {
        if distance == 0 {
            return Err(Error::AtOptimum);
        }
        if !(multiplier.is_finite() && multiplier >= 1.0) {
            return Err(Error::InvalidParameter(format!("C₀ must be >= 1, got {multiplier}")));
        }
        let star = lambda_star(n, n.saturating_sub(distance))?;
        let lambda = ((multiplier * star as f64).round() as usize).clamp(1, n);
        let mut spec = Self::new(n, distance, lambda)?;
        spec.multiplier = Some(multiplier);
        Ok(spec)
    }
}

/// Target `z = 1ⁿ` and `x` = `z` with its first `distance` bits flipped.
///
/// `OM_z` is invariant under permuting positions, so this stands in for every
/// state at the same distance.
pub fn state_at_distance(n: usize, distance: usize) -> Result<(BitString, BitString)> {
    if distance > n {
        return Err(Error::InvalidParameter(format!("distance {distance} exceeds n = {n}")));
    }
    let z = BitString::ones(n)?;
    let mut x = z.clone();
    for i in 0..distance {
        x.flip(i);
    }
    Ok((z, x))
}

fn chunked_count<R, F>(samples: u64, rng: &mut R, execution: Execution, trial_batch: F) -> u64
where
    R: Rng + ?Sized,
    F: Fn(u64, u64) -> u64 + Sync + Send,
{
    let seeds: Vec<u64> = (0..CHUNKS).map(|_| rng.random()).collect();
    let base = samples / CHUNKS as u64;
    let extra = samples % CHUNKS as u64;
    map_indexed(CHUNKS, execution, |i| {
        let count = base + u64::from((i as u64) < extra);
        trial_batch(seeds[i], count)
    })
    .into_iter()
    .sum()
}

/// Fraction of single GA iterations from a state at distance `spec.distance`
/// that strictly increase the fitness (`p = λ/n`, `c = 1/λ`).
pub fn estimate_iteration_success<R: Rng + ?Sized>(
    spec: &StateSpec,
    samples: u64,
    rng: &mut R,
) -> Result<EstimateReport> {
    estimate_iteration_success_with(spec, samples, rng, Execution::default())
}

pub fn estimate_iteration_success_with<R: Rng + ?Sized>(
    spec: &StateSpec,
    samples: u64,
    rng: &mut R,
    execution: Execution,
) -> Result<EstimateReport> {
    if spec.distance == 0 {
        return Err(Error::AtOptimum);
    }
    if samples < MIN_ITERATION_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_ITERATION_SAMPLES} samples, got {samples}"
        )));
    }
    let (z, x) = state_at_distance(spec.n, spec.distance)?;
    let n = spec.n;
    let lambda = spec.lambda;
    let p = lambda as f64 / n as f64;
    let c = 1.0 / lambda as f64;
    let start_value = crate::onemax::FitnessValue(n - spec.distance);

    let run_batch = |seed: u64, count: u64| -> Result<u64> {
        let mut rng = stream(seed);
        let mut inst = OneMaxInstance::new(z.clone());
        let mut ws = Workspace::new(n)?;
        let mut state = Incumbent {
            point: x.clone(),
            value: start_value,
        };
        let mut hits = 0;
        for _ in 0..count {
            state.point.copy_from(&x);
            state.value = start_value;
            let out = ga_iteration(&mut state, &mut inst, lambda, p, c, u64::MAX, &mut rng, &mut ws)?;
            debug_assert_ne!(out.status, IterationStatus::BudgetExhausted);
            hits += u64::from(out.success);
        }
        Ok(hits)
    };
    // Parameters were validated above; a failure here is a bug.
    let hits = chunked_count(samples, rng, execution, |seed, count| {
        run_batch(seed, count).expect("validated iteration inputs")
    });
    Ok(EstimateReport::from_counts(hits, samples))
}

/// Smallest `C₀` in `multipliers` (tried in order) whose estimate clears
/// `threshold` at 3σ: `q̂ − 3σ > threshold`.
pub fn smallest_passing_multiplier<R: Rng + ?Sized>(
    n: usize,
    distance: usize,
    multipliers: &[f64],
    threshold: f64,
    samples: u64,
    rng: &mut R,
) -> Result<Option<(StateSpec, EstimateReport)>> {
    for &m in multipliers {
        let spec = StateSpec::with_multiplier(n, distance, m)?;
        let report = estimate_iteration_success(&spec, samples, rng)?;
        if report.lower_3sigma > threshold {
            return Ok(Some((spec, report)));
        }
    }
    Ok(None)
}

/// `1 − (f/n)^{λℓ}`.
pub fn mutation_phase_bound(n: usize, fitness: usize, lambda: usize, ell: usize) -> f64 {
    1.0 - (fitness as f64 / n as f64).powf(lambda as f64 * ell as f64)
}

/// `1 − (1 − c(1−c)^{ℓ−1})^λ` with `c = 1/λ`.
pub fn crossover_phase_bound(lambda: usize, ell: usize) -> f64 {
    let c = 1.0 / lambda as f64;
    1.0 - (1.0 - c * (1.0 - c).powi(ell as i32 - 1)).powi(lambda as i32)
}

/// Estimates the probability that some of `lambda` mutants `mut_ℓ(x)` of a
/// state with fitness `fitness` has fitness above `fitness − ℓ`, with `ℓ` fixed.
pub fn verify_mutation_phase_bound<R: Rng + ?Sized>(
    n: usize,
    fitness: usize,
    lambda: usize,
    ell: usize,
    samples: u64,
    rng: &mut R,
) -> Result<BoundCheck> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ℓ must be positive".into()));
    }
    if ell > n {
        return Err(Error::StepSizeTooLarge { ell, n });
    }
    if fitness >= n {
        return Err(Error::AtOptimum);
    }
    if lambda == 0 {
        return Err(Error::InvalidParameter("λ must be positive".into()));
    }
    check_samples(samples)?;
    let (z, x) = state_at_distance(n, n - fitness)?;

    let hits = chunked_count(samples, rng, Execution::default(), |seed, count| {
        let mut rng = stream(seed);
        let mut mutator = Mutator::new(n);
        let mut y = x.clone();
        let mut hits = 0;
        for _ in 0..count {
            let mut hit = false;
            for _ in 0..lambda {
                y.copy_from(&x);
                mutator
                    .flip_random_subset(&mut y, ell, &mut rng)
                    .expect("validated step size");
                if y.hamming_unchecked(&z) < n - fitness + ell {
                    hit = true;
                    break;
                }
            }
            hits += u64::from(hit);
        }
        hits
    });
    Ok(BoundCheck {
        empirical: EstimateReport::from_counts(hits, samples),
        analytic_bound: mutation_phase_bound(n, fitness, lambda, ell),
    })
}

/// A conditioned crossover-phase state: `x` at distance `distance` from
/// `z = 1ⁿ`, and `x'` = `x` with `good` wrong bits corrected and `ell − good`
/// correct bits broken.
pub fn crossover_state(
    n: usize,
    distance: usize,
    ell: usize,
    good: usize,
) -> Result<(BitString, BitString, BitString)> {
    if good > distance || good > ell || ell - good > n - distance {
        return Err(Error::InvalidParameter(format!(
            "cannot build x' with {good} corrected and {} broken bits at distance {distance} (n = {n})",
            ell.saturating_sub(good)
        )));
    }
    let (z, x) = state_at_distance(n, distance)?;
    let mut xprime = x.clone();
    for i in 0..good {
        xprime.flip(i);
    }
    for i in distance..distance + (ell - good) {
        xprime.flip(i);
    }
    Ok((z, x, xprime))
}

/// Estimates the probability that some of `lambda` offspring `cross_c(x, x')`,
/// `c = 1/λ`, is strictly better than `x`, for a fixed mutant `x'` at
/// Hamming distance `ell` from `x` with `OM(x') > OM(x) − ℓ`.
pub fn verify_crossover_phase_bound<R: Rng + ?Sized>(
    target: &BitString,
    x: &BitString,
    xprime: &BitString,
    ell: usize,
    lambda: usize,
    samples: u64,
    rng: &mut R,
) -> Result<BoundCheck> {
    let fx = x.agreements(target)?;
    let fxp = xprime.agreements(target)?;
    let dist = x.hamming(xprime)?;
    if ell == 0 || dist != ell {
        return Err(Error::InvalidParameter(format!(
            "x' must differ from x in exactly ℓ = {ell} > 0 positions, found {dist}"
        )));
    }
    if fxp + ell <= fx {
        return Err(Error::InvalidParameter(
            "conditioning OM(x') > OM(x) − ℓ is not satisfied".into(),
        ));
    }
    if lambda == 0 {
        return Err(Error::InvalidParameter("λ must be positive".into()));
    }
    check_samples(samples)?;
    let c = 1.0 / lambda as f64;
    let n = x.len();
    let mut template = CrossoverPlan::new();
    template.prepare(x, xprime)?;

    let hits = chunked_count(samples, rng, Execution::default(), |seed, count| {
        let mut rng = stream(seed);
        let mut plan = template.clone();
        let mut y = x.clone();
        let mut hits = 0;
        for _ in 0..count {
            let mut hit = false;
            for _ in 0..lambda {
                plan.sample_into(x, c, &mut rng, &mut y).expect("validated rate");
                if n - y.hamming_unchecked(target) > fx {
                    hit = true;
                    break;
                }
            }
            hits += u64::from(hit);
        }
        hits
    });
    Ok(BoundCheck {
        empirical: EstimateReport::from_counts(hits, samples),
        analytic_bound: crossover_phase_bound(lambda, ell),
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct DriftEstimate {
    pub q: f64,
    pub r: f64,
    pub steps: u64,
    pub mean: f64,
    pub std_error: f64,
    pub closed_form: f64,
}

impl DriftEstimate {
    pub fn within_3sigma(&self) -> bool {
        (self.mean - self.closed_form).abs() <= 3.0 * self.std_error
    }
}

/// `(1−q)/(r−1) − q`: expected change of `log_F λ` per iteration under the 1/r rule.
pub fn drift_closed_form(q: f64, r: f64) -> f64 {
    (1.0 - q) / (r - 1.0) - q
}

/// Simulates the walk that steps −1 with probability `q` and `+1/(r−1)` otherwise.
pub fn random_walk_drift<R: Rng + ?Sized>(q: f64, r: f64, steps: u64, rng: &mut R) -> Result<DriftEstimate> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidProbability(q));
    }
    if !(r.is_finite() && r > 1.0) {
        return Err(Error::InvalidParameter(format!("r must exceed 1, got {r}")));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter("need at least two steps".into()));
    }
    let down = chunked_count(steps, rng, Execution::default(), |seed, count| {
        let mut rng = stream(seed);
        (0..count).filter(|_| rng.random_bool(q)).count() as u64
    });
    let up_step = 1.0 / (r - 1.0);
    let k = down as f64;
    let total = steps as f64;
    let mean = (-k + (total - k) * up_step) / total;
    // Two-point steps: variance = (step gap)² · q̂(1 − q̂).
    let q_hat = k / total;
    let gap = 1.0 + up_step;
    let std_error = gap * (q_hat * (1.0 - q_hat) / total).sqrt();
    Ok(DriftEstimate {
        q,
        r,
        steps,
        mean,
        std_error,
        closed_form: drift_closed_form(q, r),
    })
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        Err(Error::InvalidParameter("need at least one sample".into()))
    } else {
        Ok(())
    }
}

/// One cell of the mutation-phase validation grid.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationCell {
    pub n: usize,
    pub fitness: usize,
    pub lambda: usize,
    pub ell: usize,
}

/// One cell of the crossover-phase validation grid.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossoverCell {
    pub n: usize,
    pub distance: usize,
    pub ell: usize,
    /// Wrong bits of `x` that `x'` corrects.
    pub good: usize,
    pub lambda: usize,
}

pub const MUTATION_GRID: [MutationCell; 12] = [
    MutationCell {
        n: 20,
        fitness: 19,
        lambda: 2,
        ell: 1,
    },
    MutationCell {
        n: 20,
        fitness: 10,
        lambda: 1,
        ell: 1,
    },
    MutationCell {
        n: 20,
        fitness: 15,
        lambda: 4,
        ell: 2,
    },
    MutationCell {
        n: 50,
        fitness: 45,
        lambda: 3,
        ell: 3,
    },
    MutationCell {
        n: 50,
        fitness: 49,
        lambda: 8,
        ell: 1,
    },
    MutationCell {
        n: 100,
        fitness: 90,
        lambda: 5,
        ell: 5,
    },
    MutationCell {
        n: 100,
        fitness: 99,
        lambda: 10,
        ell: 10,
    },
    MutationCell {
        n: 100,
        fitness: 50,
        lambda: 2,
        ell: 4,
    },
    MutationCell {
        n: 400,
        fitness: 396,
        lambda: 20,
        ell: 20,
    },
    MutationCell {
        n: 400,
        fitness: 380,
        lambda: 8,
        ell: 8,
    },
    MutationCell {
        n: 1000,
        fitness: 999,
        lambda: 32,
        ell: 32,
    },
    MutationCell {
        n: 1000,
        fitness: 900,
        lambda: 4,
        ell: 4,
    },
];

pub const CROSSOVER_GRID: [CrossoverCell; 12] = [
    CrossoverCell {
        n: 20,
        distance: 1,
        ell: 1,
        good: 1,
        lambda: 1,
    },
    CrossoverCell {
        n: 50,
        distance: 10,
        ell: 4,
        good: 1,
        lambda: 4,
    },
    CrossoverCell {
        n: 64,
        distance: 32,
        ell: 3,
        good: 1,
        lambda: 2,
    },
    CrossoverCell {
        n: 100,
        distance: 10,
        ell: 5,
        good: 1,
        lambda: 5,
    },
    CrossoverCell {
        n: 100,
        distance: 10,
        ell: 5,
        good: 2,
        lambda: 5,
    },
    CrossoverCell {
        n: 100,
        distance: 50,
        ell: 10,
        good: 3,
        lambda: 10,
    },
    CrossoverCell {
        n: 200,
        distance: 2,
        ell: 6,
        good: 2,
        lambda: 6,
    },
    CrossoverCell {
        n: 400,
        distance: 4,
        ell: 10,
        good: 1,
        lambda: 10,
    },
    CrossoverCell {
        n: 400,
        distance: 20,
        ell: 20,
        good: 1,
        lambda: 20,
    },
    CrossoverCell {
        n: 400,
        distance: 200,
        ell: 16,
        good: 8,
        lambda: 16,
    },
    CrossoverCell {
        n: 1000,
        distance: 5,
        ell: 32,
        good: 1,
        lambda: 32,
    },
    CrossoverCell {
        n: 1000,
        distance: 50,
        ell: 8,
        good: 2,
        lambda: 8,
    },
];

pub fn check_mutation_cell<R: Rng + ?Sized>(cell: &MutationCell, samples: u64, rng: &mut R) -> Result<BoundCheck> {
    verify_mutation_phase_bound(cell.n, cell.fitness, cell.lambda, cell.ell, samples, rng)
}

pub fn check_crossover_cell<R: Rng + ?Sized>(cell: &CrossoverCell, samples: u64, rng: &mut R) -> Result<BoundCheck> {
    let (z, x, xprime) = crossover_state(cell.n, cell.distance, cell.ell, cell.good)?;
    verify_crossover_phase_bound(&z, &x, &xprime, cell.ell, cell.lambda, samples, rng)
}
