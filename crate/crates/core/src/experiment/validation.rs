//! Tabular runs of the Monte-Carlo validators, shared by the CLI and the
//! acceptance suite.

use crate::error::Result;
use crate::experiment::output::Table;
use crate::oracles::{
    check_crossover_cell, check_mutation_cell, estimate_iteration_success, random_walk_drift, StateSpec,
    CROSSOVER_GRID, MUTATION_GRID,
};
use crate::rng::{derive_seed, stream};

/// Success threshold that λ = C₀·λ* must clear.
pub const SUCCESS_FLOOR: f64 = 0.2;
/// Upper limit for the success probability at λ = n.
pub const SUCCESS_CEILING: f64 = 0.40;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleRow {
    pub check: &'static str,
    pub n: Option<usize>,
    pub distance: Option<usize>,
    pub lambda: Option<usize>,
    pub ell: Option<usize>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub samples: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub lower_3sigma: f64,
    pub upper_3sigma: f64,
    /// Analytic bound, closed form or threshold the estimate is compared with.
    pub reference: f64,
    pub pass: bool,
}

impl OracleRow {
    pub const HEADER: [&'static str; 14] = [
        "check",
        "n",
        "distance",
        "lambda",
        "ell",
        "q",
        "r",
        "samples",
        "estimate",
        "std_error",
        "lower_3sigma",
        "upper_3sigma",
        "reference",
        "pass",
    ];

    pub fn record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|v| v.to_string()).unwrap_or_default()
        }
        vec![
            self.check.to_owned(),
            opt(self.n),
            opt(self.distance),
            opt(self.lambda),
            opt(self.ell),
            opt(self.q),
            opt(self.r),
            self.samples.to_string(),
            self.estimate.to_string(),
            self.std_error.to_string(),
            self.lower_3sigma.to_string(),
            self.upper_3sigma.to_string(),
            self.reference.to_string(),
            self.pass.to_string(),
        ]
    }

    pub fn table(rows: &[OracleRow]) -> Table {
        Table {
            header: Self::HEADER.to_vec(),
            rows: rows.iter().map(Self::record).collect(),
        }
    }

    fn blank(check: &'static str) -> Self {
        Self {
            check,
            n: None,
            distance: None,
            lambda: None,
            ell: None,
            q: None,
            r: None,
            samples: 0,
            estimate: 0.0,
            std_error: 0.0,
            lower_3sigma: 0.0,
            upper_3sigma: 0.0,
            reference: 0.0,
            pass: false,
        }
    }
}

/// Mutation-phase bound on every cell of [`MUTATION_GRID`].
pub fn mutation_rows(samples: u64, seed: u64) -> Result<Vec<OracleRow>> {
    MUTATION_GRID
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let mut rng = stream(derive_seed(seed, &format!("mutation/{i}")));
            let check = check_mutation_cell(cell, samples, &mut rng)?;
            let e = check.empirical;
            Ok(OracleRow {
                n: Some(cell.n),
                distance: Some(cell.n - cell.fitness),
                lambda: Some(cell.lambda),
                ell: Some(cell.ell),
                samples: e.samples,
                estimate: e.estimate,
                std_error: e.std_error,
                lower_3sigma: e.lower_3sigma,
                upper_3sigma: e.upper_3sigma,
                reference: check.analytic_bound,
                pass: check.holds(),
                ..OracleRow::blank("mutation-phase")
            })
        })
        .collect()
}

/// Crossover-phase bound on every cell of [`CROSSOVER_GRID`].
pub fn crossover_rows(samples: u64, seed: u64) -> Result<Vec<OracleRow>> {
    CROSSOVER_GRID
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let mut rng = stream(derive_seed(seed, &format!("crossover/{i}")));
            let check = check_crossover_cell(cell, samples, &mut rng)?;
            let e = check.empirical;
            Ok(OracleRow {
                n: Some(cell.n),
                distance: Some(cell.distance),
                lambda: Some(cell.lambda),
                ell: Some(cell.ell),
                samples: e.samples,
                estimate: e.estimate,
                std_error: e.std_error,
                lower_3sigma: e.lower_3sigma,
                upper_3sigma: e.upper_3sigma,
                reference: check.analytic_bound,
                pass: check.holds(),
                ..OracleRow::blank("crossover-phase")
            })
        })
        .collect()
}

/// Distances `n/2`, `n/10` and `⌈√n⌉`.
pub fn success_distances(n: usize) -> Vec<usize> {
    let root = (1..=n).find(|k| k * k >= n).unwrap_or(n);
    vec![(n / 2).max(1), (n / 10).max(1), root]
}

/// Per-iteration success at λ = `multiplier`·λ* (must exceed [`SUCCESS_FLOOR`]
/// at 3σ) and at λ = n (must stay below [`SUCCESS_CEILING`] at 3σ) for each
/// distance in [`success_distances`].
pub fn success_rows(n: usize, multiplier: f64, samples: u64, seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for d in success_distances(n) {
        let scaled = StateSpec::with_multiplier(n, d, multiplier)?;
        let full = StateSpec::new(n, d, n)?;
        for (check, spec) in [("iteration-success", scaled), ("iteration-success-at-n", full)] {
            let mut rng = stream(derive_seed(seed, &format!("{check}/{n}/{d}/{}", spec.lambda)));
            let e = estimate_iteration_success(&spec, samples, &mut rng)?;
            let (reference, pass) = if check == "iteration-success" {
                (SUCCESS_FLOOR, e.lower_3sigma > SUCCESS_FLOOR)
            } else {
                (SUCCESS_CEILING, e.upper_3sigma < SUCCESS_CEILING)
            };
            rows.push(OracleRow {
                n: Some(n),
                distance: Some(d),
                lambda: Some(spec.lambda),
                samples: e.samples,
                estimate: e.estimate,
                std_error: e.std_error,
                lower_3sigma: e.lower_3sigma,
                upper_3sigma: e.upper_3sigma,
                reference,
                pass,
                ..OracleRow::blank(check)
            });
        }
    }
    Ok(rows)
}

/// Drift of `log_F λ` for every `(q, r)` pair; passes when within 3σ of the closed form.
pub fn drift_rows(qs: &[f64], rs: &[f64], steps: u64, seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for &r in rs {
        for &q in qs {
            let mut rng = stream(derive_seed(seed, &format!("drift/{q}/{r}")));
            let d = random_walk_drift(q, r, steps, &mut rng)?;
            rows.push(OracleRow {
                q: Some(q),
                r: Some(r),
                samples: steps,
                estimate: d.mean,
                std_error: d.std_error,
                lower_3sigma: d.mean - 3.0 * d.std_error,
                upper_3sigma: d.mean + 3.0 * d.std_error,
                reference: d.closed_form,
                pass: d.within_3sigma(),
                ..OracleRow::blank("drift")
            });
        }
    }
    Ok(rows)
}
