use crate::bitstring::BitString;
use crate::engine::{run_baseline, run_ga, GaParams, RateLambda, Recording, RunResult};
use crate::error::{Error, Result};
use crate::onemax::OneMaxInstance;
use crate::parallel::{map_indexed, Execution};
use crate::rng::{derive_seed, run_seed, stream};

use super::config::{Algorithm, ExperimentConfig};
use super::output;
use super::stats::SummaryRow;

/// One replicate of one size.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub n: usize,
    pub replicate: usize,
    /// Seed from which both the target and the search stream derive.
    pub seed: u64,
    pub result: RunResult,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// One row per entry of `n_values`, in order.
    pub rows: Vec<SummaryRow>,
    /// Sorted by `(n, replicate)`.
    pub runs: Vec<RunRecord>,
}

impl ExperimentReport {
    /// Mean over replicates of the fraction of iterations spent at λ = n.
    pub fn mean_cap_occupancy(&self, n: usize) -> f64 {
        let runs: Vec<_> = self.runs.iter().filter(|r| r.n == n).collect();
        if runs.is_empty() {
            return 0.0;
        }
        runs.iter().map(|r| r.result.cap_occupancy()).sum::<f64>() / runs.len() as f64
    }
}

/// Runs replicate `replicate` at size `n`.
///
/// The hidden target and the search stream come from independent streams
/// derived from `run_seed(base_seed, algorithm, n, replicate)`, so adding
/// replicates or sizes never changes existing runs.
pub fn run_single(cfg: &ExperimentConfig, n: usize, replicate: usize) -> Result<RunRecord> {
    let seed = run_seed(cfg.base_seed, cfg.algorithm.name(), n, replicate);
    let target = BitString::random(n, &mut stream(derive_seed(seed, "target")))?;
    let mut instance = OneMaxInstance::new(target);
    let search_seed = derive_seed(seed, "search");
    let recording = if cfg.trace { Recording::TRACE } else { Recording::NONE };
    let budget = cfg.budget(n);

    let mut result = match (cfg.algorithm.baseline(), cfg.control_mode()) {
        (Some(kind), _) => run_baseline(kind, &mut instance, budget, search_seed, recording)?,
        (None, Some(mode)) => {
            let mut params = GaParams::new(n)
                .with_seed(search_seed)
                .with_budget(budget)
                .with_recording(recording);
            if let Some(f) = cfg.update_strength {
                params.update_strength = f;
            }
            if let Some(r) = cfg.r {
                params.success_ratio = r;
            }
            if cfg.algorithm == Algorithm::GaSelfAdjusting {
                if let Some(l) = cfg.lambda {
                    params.lambda0 = l;
                }
            }
            if cfg.rounded_rates {
                params.rate_lambda = RateLambda::Rounded;
            }
            run_ga(&params, mode, &mut instance)?
        }
        (None, None) => unreachable!("every algorithm is a baseline or has a control mode"),
    };
    result.seed = seed;
    Ok(RunRecord {
        n,
        replicate,
        seed,
        result,
    })
}

/// Validates `cfg` and runs every replicate without writing anything.
pub fn execute(cfg: &ExperimentConfig, execution: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.replicates).map(move |i| (n, i)))
        .collect();
    let runs = map_indexed(jobs.len(), execution, |j| run_single(cfg, jobs[j].0, jobs[j].1))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let rows = cfg
        .n_values
        .iter()
        .map(|&n| {
            let outcomes: Vec<(u64, bool)> = runs
                .iter()
                .filter(|r| r.n == n)
                .map(|r| (r.result.total_evals, r.result.found_optimum))
                .collect();
            SummaryRow::from_runs(cfg.algorithm.name(), n, &outcomes)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        config: cfg.clone(),
        rows,
        runs,
    })
}

/// Runs the experiment and, when `cfg.output` is set, writes `summary.csv`,
/// `manifest.toml` and (with tracing on) one CSV per run under `traces/`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(cfg, Execution::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, execution: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    // Fail on an unusable output directory before spending time on runs.
    if let Some(dir) = &cfg.output {
        output::prepare_dir(dir)?;
    }
    let report = execute(cfg, execution)?;
    if let Some(dir) = &cfg.output {
        output::write_report(dir, &report)?;
    }
    Ok(report)
}

/// Shared knobs of the grid and sweep studies.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyOptions {
    pub replicates: usize,
    pub base_seed: u64,
    pub budget_factor: u64,
    pub execution: Execution,
}

impl StudyOptions {
    pub fn new(replicates: usize, base_seed: u64) -> Self {
        Self {
            replicates,
            base_seed,
            budget_factor: GaParams::DEFAULT_BUDGET_FACTOR,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    pub lambda: f64,
    pub row: SummaryRow,
}

/// One summary row per static λ at size `n`.
pub fn static_lambda_grid(n: usize, lambda_values: &[f64], replicates: usize, seed: u64) -> Result<Vec<GridRow>> {
    static_lambda_grid_with(n, lambda_values, &StudyOptions::new(replicates, seed))
}

pub fn static_lambda_grid_with(n: usize, lambda_values: &[f64], opts: &StudyOptions) -> Result<Vec<GridRow>> {
    if lambda_values.is_empty() {
        return Err(Error::InvalidConfig("the λ grid is empty".into()));
    }
    lambda_values
        .iter()
        .map(|&lambda| {
            let mut cfg = ExperimentConfig::new(Algorithm::GaStatic, vec![n]);
            cfg.lambda = Some(lambda);
            cfg.replicates = opts.replicates;
            cfg.base_seed = opts.base_seed;
            cfg.budget_factor = opts.budget_factor;
            let mut report = execute(&cfg, opts.execution)?;
            Ok(GridRow {
                lambda,
                row: report.rows.remove(0),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub update_strength: f64,
    pub success_ratio: f64,
    pub row: SummaryRow,
    /// Mean fraction of iterations spent with λ = n.
    pub cap_occupancy: f64,
}

/// One summary row per update strength for the self-adjusting GA at size `n`.
pub fn f_sweep(n: usize, f_values: &[f64], r: f64, replicates: usize, seed: u64) -> Result<Vec<SweepRow>> {
    f_sweep_with(n, f_values, r, &StudyOptions::new(replicates, seed))
}

pub fn f_sweep_with(n: usize, f_values: &[f64], r: f64, opts: &StudyOptions) -> Result<Vec<SweepRow>> {
    if f_values.is_empty() {
        return Err(Error::InvalidConfig("the F sweep is empty".into()));
    }
    f_values
        .iter()
        .map(|&f| {
            let mut cfg = ExperimentConfig::new(Algorithm::GaSelfAdjusting, vec![n]);
            cfg.update_strength = Some(f);
            cfg.r = Some(r);
            cfg.replicates = opts.replicates;
            cfg.base_seed = opts.base_seed;
            cfg.budget_factor = opts.budget_factor;
            let mut report = execute(&cfg, opts.execution)?;
            Ok(SweepRow {
                update_strength: f,
                success_ratio: r,
                cap_occupancy: report.mean_cap_occupancy(n),
                row: report.rows.remove(0),
            })
        })
        .collect()
}
