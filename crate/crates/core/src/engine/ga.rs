//! The (1+(λ,λ)) GA main loop.

use rand::Rng;

use super::controller::{ControlMode, LambdaController};
use super::record::{IterationRecord, Recording, RunResult};
use crate::bitstring::BitString;
use crate::error::{check_probability, Error, Result};
use crate::onemax::Objective;
use crate::rng::stream;
use crate::variation::{sample_binomial, CrossoverPlan, Mutator};

/// Which λ drives the mutation and crossover probabilities.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum RateLambda {
    /// `p = λ/n`, `c = 1/λ` with the real-valued λ.
    #[default]
    Real,
    /// `p` and `c` from the rounded offspring count.
    Rounded,
}

#[derive(Clone, Debug)]
pub struct GaParams {
    pub n: usize,
    /// Update strength `F > 1`.
    pub update_strength: f64,
    /// Success-rule denominator `r ≥ 2`; 5 is the one-fifth rule.
    pub success_ratio: f64,
    /// Initial λ of the self-adjusting controller.
    pub lambda0: f64,
    /// Maximum number of evaluations, initial sample included.
    pub budget: u64,
    pub seed: u64,
    pub rate_lambda: RateLambda,
    pub recording: Recording,
}

impl GaParams {
    pub const DEFAULT_BUDGET_FACTOR: u64 = 10_000;

    pub fn new(n: usize) -> Self {
        Self {
            n,
            update_strength: 1.5,
            success_ratio: 5.0,
            lambda0: 1.0,
            budget: Self::DEFAULT_BUDGET_FACTOR.saturating_mul(n as u64),
            seed: 0,
            rate_lambda: RateLambda::Real,
            recording: Recording::NONE,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_update_strength(mut self, f: f64) -> Self {
        self.update_strength = f;
        self
    }

    pub fn with_success_ratio(mut self, r: f64) -> Self {
        self.success_ratio = r;
        self
    }

    pub fn with_recording(mut self, recording: Recording) -> Self {
        self.recording = recording;
        self
    }

    /// Builds the controller for `mode` from these parameters.
    pub fn controller(&self, mode: ControlMode) -> Result<LambdaController> {
        match mode {
            ControlMode::Static { lambda } => LambdaController::fixed(self.n, lambda),
            ControlMode::FitnessDependent => LambdaController::fitness_dependent(self.n),
            ControlMode::SelfAdjusting => {
                LambdaController::self_adjusting(self.n, self.update_strength, self.success_ratio, self.lambda0)
            }
        }
    }
}

/// The current search point and its objective value.
#[derive(Clone, Debug)]
pub struct Incumbent<V> {
    pub point: BitString,
    pub value: V,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum IterationStatus {
    Completed,
    /// An optimum was evaluated; the iteration stopped there.
    OptimumFound,
    /// The budget ran out before the iteration finished; the incumbent is unchanged.
    BudgetExhausted,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct IterationOutcome<V> {
    pub status: IterationStatus,
    pub ell: usize,
    pub value_before: V,
    pub value_after: V,
    /// `f(y) > f(x)`.
    pub success: bool,
    /// The incumbent was replaced by a different string.
    pub moved: bool,
}

/// Scratch buffers reused across iterations of one run.
#[derive(Clone, Debug)]
pub struct Workspace {
    mutator: Mutator,
    plan: CrossoverPlan,
    candidate: BitString,
    best_mutant: BitString,
    best_offspring: BitString,
}

impl Workspace {
    pub fn new(n: usize) -> Result<Self> {
        let zeros = BitString::zeros(n)?;
        Ok(Self {
            mutator: Mutator::new(n),
            plan: CrossoverPlan::new(),
            candidate: zeros.clone(),
            best_mutant: zeros.clone(),
            best_offspring: zeros,
        })
    }
}

/// One iteration: mutation phase, crossover phase, elitist selection.
///
/// `ℓ ~ B(n, p)` is drawn once and shared by all mutants. Ties among the
/// best mutants, and among the best crossover offspring that differ from
/// `x`, are broken uniformly by reservoir sampling. If no best offspring
/// differs from `x`, then `y = x`. The incumbent moves to `y` iff
/// `f(y) ≥ f(x)`.
///
/// The iteration stops at the first evaluation of an optimum, and before
/// any evaluation that would exceed `budget`.
#[allow(clippy::too_many_arguments)]
pub fn ga_iteration<O, R>(
    state: &mut Incumbent<O::Value>,
    objective: &mut O,
    lambda_int: usize,
    p: f64,
    c: f64,
    budget: u64,
    rng: &mut R,
    ws: &mut Workspace,
) -> Result<IterationOutcome<O::Value>>
where
    O: Objective,
    R: Rng + ?Sized,
{
    let n = objective.dimension();
    if state.point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: state.point.len(),
        });
    }
    if ws.mutator.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ws.mutator.n(),
        });
    }
    if lambda_int == 0 || lambda_int > n {
        return Err(Error::InvalidParameter(format!(
            "offspring count must lie in [1, {n}], got {lambda_int}"
        )));
    }
    check_probability(p)?;
    check_probability(c)?;

    let before = state.value;
    let ell = sample_binomial(n, p, rng)?;
    let outcome = |status, after, success, moved| IterationOutcome {
        status,
        ell,
        value_before: before,
        value_after: after,
        success,
        moved,
    };

    // Mutation phase.
    let mut best_mutant: Option<O::Value> = None;
    let mut ties = 0u64;
    for _ in 0..lambda_int {
        if objective.evaluations() >= budget {
            return Ok(outcome(IterationStatus::BudgetExhausted, before, false, false));
        }
        ws.candidate.copy_from(&state.point);
        ws.mutator.flip_random_subset(&mut ws.candidate, ell, rng)?;
        let v = objective.evaluate(&ws.candidate)?;
        if objective.is_optimal(v) {
            return Ok(finish_at_optimum(state, &ws.candidate, v, outcome));
        }
        match best_mutant {
            Some(b) if v < b => {}
            Some(b) if v == b => {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    std::mem::swap(&mut ws.candidate, &mut ws.best_mutant);
                }
            }
            _ => {
                best_mutant = Some(v);
                ties = 1;
                std::mem::swap(&mut ws.candidate, &mut ws.best_mutant);
            }
        }
    }

    // Crossover phase.
    ws.plan.prepare(&state.point, &ws.best_mutant)?;
    let mut max_value: Option<O::Value> = None;
    let mut candidates = 0u64;
    for _ in 0..lambda_int {
        if objective.evaluations() >= budget {
            return Ok(outcome(IterationStatus::BudgetExhausted, before, false, false));
        }
        let taken = ws.plan.sample_into(&state.point, c, rng, &mut ws.candidate)?;
        let v = objective.evaluate(&ws.candidate)?;
        if objective.is_optimal(v) {
            return Ok(finish_at_optimum(state, &ws.candidate, v, outcome));
        }
        if max_value.is_none_or(|m| v > m) {
            max_value = Some(v);
            candidates = 0;
        }
        // Copies of x count towards the maximum but are never chosen.
        if Some(v) == max_value && taken > 0 {
            candidates += 1;
            if candidates == 1 || rng.random_range(0..candidates) == 0 {
                std::mem::swap(&mut ws.candidate, &mut ws.best_offspring);
            }
        }
    }

    // Selection.
    let y_value = match (candidates, max_value) {
        (k, Some(m)) if k > 0 => m,
        _ => before,
    };
    let success = y_value > before;
    let moved = candidates > 0 && y_value >= before;
    if moved {
        std::mem::swap(&mut state.point, &mut ws.best_offspring);
        state.value = y_value;
    }
    Ok(outcome(IterationStatus::Completed, state.value, success, moved))
}

fn finish_at_optimum<V: Copy + Ord>(
    state: &mut Incumbent<V>,
    optimum: &BitString,
    value: V,
    outcome: impl Fn(IterationStatus, V, bool, bool) -> IterationOutcome<V>,
) -> IterationOutcome<V> {
    let before = state.value;
    if value > before {
        state.point.copy_from(optimum);
        state.value = value;
        outcome(IterationStatus::OptimumFound, value, true, true)
    } else {
        outcome(IterationStatus::OptimumFound, before, false, false)
    }
}

/// Runs the GA on `objective` until an optimum is evaluated or the budget runs out.
///
/// The random stream is seeded from `params.seed`; the objective's hidden
/// target must come from an independent source.
pub fn run_ga<O: Objective>(params: &GaParams, mode: ControlMode, objective: &mut O) -> Result<RunResult<O::Value>> {
    let controller = params.controller(mode)?;
    let mut rng = stream(params.seed);
    run_ga_with(params, controller, objective, &mut rng)
}

/// [`run_ga`] with an explicit controller and stream.
pub fn run_ga_with<O, R>(
    params: &GaParams,
    mut controller: LambdaController,
    objective: &mut O,
    rng: &mut R,
) -> Result<RunResult<O::Value>>
where
    O: Objective,
    R: Rng + ?Sized,
{
    let n = params.n;
    if objective.dimension() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: objective.dimension(),
        });
    }
    if params.budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if objective.evaluations() != 0 {
        return Err(Error::InvalidParameter(
            "run_ga needs a fresh objective with no charged evaluations".into(),
        ));
    }

    let point = BitString::random(n, rng)?;
    let value = objective.evaluate(&point)?;
    let mut state = Incumbent { point, value };
    let mut result = RunResult {
        total_evals: 1,
        total_iters: 0,
        found_optimum: objective.is_optimal(value),
        final_value: value,
        trace: Vec::new(),
        points: Vec::new(),
        iters_at_cap: 0,
        seed: params.seed,
    };
    if result.found_optimum {
        return Ok(result);
    }
    if controller.mode() == ControlMode::FitnessDependent {
        controller.observe(false, objective.distance_to_optimum(value))?;
    }

    let mut ws = Workspace::new(n)?;
    loop {
        let lambda_real = controller.lambda();
        let lambda_int = controller.offspring_count();
        let rate_lambda = match params.rate_lambda {
            RateLambda::Real => lambda_real,
            RateLambda::Rounded => lambda_int as f64,
        };
        let p = (rate_lambda / n as f64).min(1.0);
        let c = 1.0 / rate_lambda;
        if controller.at_upper_barrier() {
            result.iters_at_cap += 1;
        }

        let out = ga_iteration(&mut state, objective, lambda_int, p, c, params.budget, rng, &mut ws)?;
        if out.status == IterationStatus::BudgetExhausted {
            break;
        }
        result.total_iters += 1;
        if params.recording.trace {
            result.trace.push(IterationRecord {
                iter: result.total_iters,
                lambda_real,
                lambda_int,
                ell: out.ell,
                fitness_before: out.value_before,
                fitness_after: out.value_after,
                success: out.success,
                evals_cum: objective.evaluations(),
            });
        }
        if params.recording.points {
            result.points.push(state.point.clone());
        }
        if out.status == IterationStatus::OptimumFound {
            result.found_optimum = true;
            break;
        }
        controller.observe(out.success, objective.distance_to_optimum(state.value))?;
    }

    result.total_evals = objective.evaluations();
    result.final_value = state.value;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onemax::{FitnessValue, OneMaxInstance, Transformed};

    fn instance(n: usize, seed: u64) -> OneMaxInstance {
        OneMaxInstance::new(BitString::random(n, &mut stream(seed ^ 0xABCD)).unwrap())
    }

    #[test]
    fn optimal_incumbent_cannot_improve() {
        let mut inst = instance(30, 1);
        let z = inst.target().clone();
        let mut state = Incumbent {
            point: z.clone(),
            value: FitnessValue(30),
        };
        let mut ws = Workspace::new(30).unwrap();
        let mut rng = stream(2);
        for _ in 0..200 {
            let out = ga_iteration(&mut state, &mut inst, 3, 0.1, 1.0 / 3.0, u64::MAX, &mut rng, &mut ws).unwrap();
            assert!(!out.success);
            assert!(!out.moved);
            assert_eq!(state.point, z);
        }
    }

    #[test]
    fn zero_step_size_changes_nothing() {
        let mut inst = instance(40, 3);
        let mut point = inst.target().clone();
        for i in 0..10 {
            point.flip(i);
        }
        let value = inst.evaluate(&point).unwrap();
        let mut state = Incumbent {
            point: point.clone(),
            value,
        };
        let mut ws = Workspace::new(40).unwrap();
        let out = ga_iteration(&mut state, &mut inst, 5, 0.0, 0.2, u64::MAX, &mut stream(4), &mut ws).unwrap();
        assert_eq!(out.ell, 0);
        assert!(!out.success);
        assert!(!out.moved);
        assert_eq!(state.point, point);
        assert_eq!(inst.evaluations(), 1 + 10);
    }

    #[test]
    fn full_iteration_charges_two_lambda() {
        let mut inst = instance(200, 5);
        let mut point = inst.target().clone();
        for i in 0..100 {
            point.flip(i);
        }
        let value = inst.evaluate(&point).unwrap();
        let mut state = Incumbent { point, value };
        let mut ws = Workspace::new(200).unwrap();
        let mut rng = stream(6);
        for _ in 0..50 {
            let before = inst.evaluations();
            let out = ga_iteration(
                &mut state,
                &mut inst,
                7,
                7.0 / 200.0,
                1.0 / 7.0,
                u64::MAX,
                &mut rng,
                &mut ws,
            )
            .unwrap();
            assert_eq!(out.status, IterationStatus::Completed);
            assert_eq!(inst.evaluations() - before, 14);
            assert!(out.value_after >= out.value_before);
        }
    }

    #[test]
    fn budget_stops_mid_iteration() {
        let mut inst = instance(100, 7);
        let point = inst.target().complement();
        let value = inst.evaluate(&point).unwrap();
        let mut state = Incumbent {
            point: point.clone(),
            value,
        };
        let mut ws = Workspace::new(100).unwrap();
        let out = ga_iteration(&mut state, &mut inst, 10, 0.1, 0.1, 5, &mut stream(8), &mut ws).unwrap();
        assert_eq!(out.status, IterationStatus::BudgetExhausted);
        assert_eq!(inst.evaluations(), 5);
        assert_eq!(state.point, point);
    }

    #[test]
    fn rejects_bad_offspring_count() {
        let mut inst = instance(10, 9);
        let point = inst.target().complement();
        let value = inst.evaluate(&point).unwrap();
        let mut state = Incumbent { point, value };
        let mut ws = Workspace::new(10).unwrap();
        assert!(ga_iteration(&mut state, &mut inst, 0, 0.1, 1.0, 100, &mut stream(1), &mut ws).is_err());
        assert!(ga_iteration(&mut state, &mut inst, 11, 0.1, 1.0, 100, &mut stream(1), &mut ws).is_err());
    }

    #[test]
    fn single_bit_problem() {
        for seed in 0..200 {
            let mut inst = instance(1, seed);
            let params = GaParams::new(1).with_seed(seed);
            let r = run_ga(&params, ControlMode::SelfAdjusting, &mut inst).unwrap();
            assert!(r.found_optimum);
            assert!(r.total_evals <= 1 + 2 * 50, "{}", r.total_evals);
        }
    }

    #[test]
    fn runs_solve_small_instances_for_every_controller() {
        let modes = [
            ControlMode::Static { lambda: 1.0 },
            ControlMode::Static { lambda: 3.0 },
            ControlMode::FitnessDependent,
            ControlMode::SelfAdjusting,
        ];
        for mode in modes {
            for seed in 0..10 {
                let mut inst = instance(64, seed);
                let params = GaParams::new(64).with_seed(seed).with_recording(Recording::TRACE);
                let r = run_ga(&params, mode, &mut inst).unwrap();
                assert!(r.found_optimum, "{mode:?}");
                assert_eq!(r.final_value, FitnessValue(64));
                assert_eq!(r.total_evals, inst.evaluations());
                assert_eq!(r.trace.len() as u64, r.total_iters);
                let mut prev = 1;
                for (k, rec) in r.trace.iter().enumerate() {
                    assert!(rec.fitness_after >= rec.fitness_before);
                    let last = k + 1 == r.trace.len();
                    if !last {
                        assert_eq!(rec.evals_cum - prev, 2 * rec.lambda_int as u64);
                    }
                    prev = rec.evals_cum;
                }
                assert_eq!(r.trace.last().unwrap().fitness_after, FitnessValue(64));
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_failure() {
        let mut inst = instance(500, 1);
        let params = GaParams::new(500).with_seed(1).with_budget(300);
        let r = run_ga(&params, ControlMode::Static { lambda: 4.0 }, &mut inst).unwrap();
        assert!(!r.found_optimum);
        assert_eq!(r.total_evals, 300);
    }

    #[test]
    fn run_needs_fresh_objective() {
        let mut inst = instance(10, 1);
        inst.evaluate(&BitString::zeros(10).unwrap()).unwrap();
        let params = GaParams::new(10);
        assert!(run_ga(&params, ControlMode::SelfAdjusting, &mut inst).is_err());
    }

    #[test]
    fn fitness_dependent_requires_absolute_values() {
        let inst = instance(50, 2);
        let mut g = Transformed::new(inst, |f| f as i64 * 3);
        let params = GaParams::new(50).with_seed(3);
        let err = run_ga(&params, ControlMode::FitnessDependent, &mut g).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn fitness_dependent_lambda_follows_fitness() {
        let mut inst = instance(400, 4);
        let params = GaParams::new(400).with_seed(4).with_recording(Recording::TRACE);
        let r = run_ga(&params, ControlMode::FitnessDependent, &mut inst).unwrap();
        for rec in &r.trace {
            let expected = crate::engine::lambda_star(400, rec.fitness_before.0).unwrap();
            assert_eq!(rec.lambda_int, expected);
            assert_eq!(rec.lambda_real, expected as f64);
        }
    }

    #[test]
    fn self_adjusting_trace_follows_the_rule() {
        let n = 300;
        let mut inst = instance(n, 8);
        let params = GaParams::new(n).with_seed(8).with_recording(Recording::TRACE);
        let r = run_ga(&params, ControlMode::SelfAdjusting, &mut inst).unwrap();
        let growth = 1.5f64.powf(0.25);
        for pair in r.trace.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            assert!(a.lambda_real >= 1.0 && a.lambda_real <= n as f64);
            let expected = if a.success {
                (a.lambda_real / 1.5).max(1.0)
            } else {
                (a.lambda_real * growth).min(n as f64)
            };
            assert_eq!(b.lambda_real, expected);
        }
    }

    #[test]
    fn rounded_rates_switch_runs() {
        let mut inst = instance(128, 9);
        let mut params = GaParams::new(128).with_seed(9);
        params.rate_lambda = RateLambda::Rounded;
        let r = run_ga(&params, ControlMode::SelfAdjusting, &mut inst).unwrap();
        assert!(r.found_optimum);
    }
}
