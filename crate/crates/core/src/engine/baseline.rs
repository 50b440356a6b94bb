//! Single-offspring elitist baselines: (1+1) EA and randomized local search.

use std::fmt;
use std::str::FromStr;

use super::record::{IterationRecord, Recording, RunResult};
use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::onemax::Objective;
use crate::rng::stream;
use crate::variation::{sample_binomial, Mutator};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    /// Standard bit mutation with rate 1/n.
    OnePlusOneEa,
    /// Flip exactly one uniformly chosen bit.
    Rls,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::OnePlusOneEa => "one-plus-one-ea",
            Self::Rls => "rls",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-plus-one-ea" => Ok(Self::OnePlusOneEa),
            "rls" => Ok(Self::Rls),
            other => Err(Error::InvalidParameter(format!("unknown baseline {other:?}"))),
        }
    }
}

/// Runs a baseline until an optimum is evaluated or `budget` evaluations are spent.
///
/// One evaluation per iteration; the offspring replaces the parent iff it is
/// at least as good. The (1+1) EA draws the number of flipped bits from
/// `B(n, 1/n)` and flips that many distinct positions, which is the same
/// distribution as flipping each bit independently.
pub fn run_baseline<O: Objective>(
    kind: BaselineKind,
    objective: &mut O,
    budget: u64,
    seed: u64,
    recording: Recording,
) -> Result<RunResult<O::Value>> {
    let n = objective.dimension();
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if objective.evaluations() != 0 {
        return Err(Error::InvalidParameter(
            "run_baseline needs a fresh objective with no charged evaluations".into(),
        ));
    }
    let mut rng = stream(seed);
    let mut x = BitString::random(n, &mut rng)?;
    let mut fx = objective.evaluate(&x)?;
    let mut result = RunResult {
        total_evals: 1,
        total_iters: 0,
        found_optimum: objective.is_optimal(fx),
        final_value: fx,
        trace: Vec::new(),
        points: Vec::new(),
        iters_at_cap: 0,
        seed,
    };
    let mut mutator = Mutator::new(n);
    let mut y = x.clone();
    let rate = 1.0 / n as f64;

    while !result.found_optimum && objective.evaluations() < budget {
        let ell = match kind {
            BaselineKind::OnePlusOneEa => sample_binomial(n, rate, &mut rng)?,
            BaselineKind::Rls => 1,
        };
        y.copy_from(&x);
        mutator.flip_random_subset(&mut y, ell, &mut rng)?;
        let fy = objective.evaluate(&y)?;
        let before = fx;
        if fy >= fx {
            std::mem::swap(&mut x, &mut y);
            fx = fy;
        }
        result.total_iters += 1;
        result.found_optimum = objective.is_optimal(fy);
        if recording.trace {
            result.trace.push(IterationRecord {
                iter: result.total_iters,
                lambda_real: 1.0,
                lambda_int: 1,
                ell,
                fitness_before: before,
                fitness_after: fx,
                success: fx > before,
                evals_cum: objective.evaluations(),
            });
        }
        if recording.points {
            result.points.push(x.clone());
        }
    }

    result.total_evals = objective.evaluations();
    result.final_value = fx;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onemax::{FitnessValue, OneMaxInstance};

    fn instance(n: usize, seed: u64) -> OneMaxInstance {
        OneMaxInstance::new(BitString::random(n, &mut stream(seed.wrapping_add(991))).unwrap())
    }

    #[test]
    fn rls_on_one_bit_needs_at_most_two_evaluations() {
        for seed in 0..100 {
            let mut inst = instance(1, seed);
            let r = run_baseline(BaselineKind::Rls, &mut inst, 100, seed, Recording::NONE).unwrap();
            assert!(r.found_optimum);
            assert!(r.total_evals <= 2);
        }
    }

    #[test]
    fn rls_matches_coupon_collector() {
        let n = 500;
        let runs = 200;
        let mean = (0..runs)
            .map(|s| {
                let mut inst = instance(n, s);
                run_baseline(BaselineKind::Rls, &mut inst, u64::MAX, s + 10_000, Recording::NONE)
                    .unwrap()
                    .total_evals as f64
            })
            .sum::<f64>()
            / runs as f64;
        let reference = n as f64 * ((n as f64 / 2.0).ln() + 0.5772);
        assert!(
            (mean / reference - 1.0).abs() <= 0.10,
            "mean {mean}, reference {reference}"
        );
        // Coupon collector from distance n/2: n/1 + n/2 + ... + n/(n/2).
        let harmonic: f64 = (1..=n / 2).map(|k| n as f64 / k as f64).sum();
        assert!((harmonic / reference - 1.0).abs() < 0.01);
    }

    #[test]
    fn traces_are_elitist_and_count_one_eval_per_iteration() {
        let mut inst = instance(100, 3);
        let r = run_baseline(BaselineKind::OnePlusOneEa, &mut inst, u64::MAX, 3, Recording::TRACE).unwrap();
        assert!(r.found_optimum);
        assert_eq!(r.final_value, FitnessValue(100));
        for (k, rec) in r.trace.iter().enumerate() {
            assert!(rec.fitness_after >= rec.fitness_before);
            assert_eq!(rec.evals_cum, k as u64 + 2);
        }
    }

    #[test]
    fn budget_exhaustion() {
        let mut inst = instance(1000, 4);
        let r = run_baseline(BaselineKind::OnePlusOneEa, &mut inst, 50, 4, Recording::NONE).unwrap();
        assert!(!r.found_optimum);
        assert_eq!(r.total_evals, 50);
    }

    #[test]
    fn names_round_trip() {
        for k in [BaselineKind::OnePlusOneEa, BaselineKind::Rls] {
            assert_eq!(k.name().parse::<BaselineKind>().unwrap(), k);
        }
        assert!("sa".parse::<BaselineKind>().is_err());
    }
}
