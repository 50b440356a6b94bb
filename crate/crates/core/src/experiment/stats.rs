use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aggregate of all replicates of one algorithm at one problem size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub n: usize,
    pub replicates: usize,
    pub mean_evals: f64,
    pub median_evals: f64,
    pub std_evals: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    /// Fraction of replicates that found the optimum within budget.
    pub success_rate: f64,
    pub mean_evals_over_n: f64,
}

impl SummaryRow {
    pub const HEADER: [&'static str; 10] = [
        "algorithm",
        "n",
        "replicates",
        "mean_evals",
        "median_evals",
        "std_evals",
        "ci95_low",
        "ci95_high",
        "success_rate",
        "mean_evals_over_n",
    ];

    /// Summarizes `(evaluations, found_optimum)` pairs. Censored runs
    /// contribute their spent budget.
    pub fn from_runs(algorithm: &str, n: usize, runs: &[(u64, bool)]) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::InvalidParameter("cannot summarize zero runs".into()));
        }
        let k = runs.len();
        let evals: Vec<f64> = runs.iter().map(|&(e, _)| e as f64).collect();
        let mean = evals.iter().sum::<f64>() / k as f64;
        let std = if k > 1 {
            (evals.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
        } else {
            0.0
        };
        let half = 1.96 * std / (k as f64).sqrt();
        let successes = runs.iter().filter(|&&(_, ok)| ok).count();
        Ok(Self {
            algorithm: algorithm.to_owned(),
            n,
            replicates: k,
            mean_evals: mean,
            median_evals: median(&evals),
            std_evals: std,
            ci95_low: mean - half,
            ci95_high: mean + half,
            success_rate: successes as f64 / k as f64,
            mean_evals_over_n: mean / n as f64,
        })
    }

    pub fn record(&self) -> Vec<String> {
        vec![
            self.algorithm.clone(),
            self.n.to_string(),
            self.replicates.to_string(),
            self.mean_evals.to_string(),
            self.median_evals.to_string(),
            self.std_evals.to_string(),
            self.ci95_low.to_string(),
            self.ci95_high.to_string(),
            self.success_rate.to_string(),
            self.mean_evals_over_n.to_string(),
        ]
    }

    /// 95% intervals do not overlap.
    pub fn ci_separated(&self, other: &Self) -> bool {
        self.ci95_high < other.ci95_low || other.ci95_high < self.ci95_low
    }

    pub fn censored(&self) -> bool {
        self.success_rate < 1.0
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln n, ln mean_evals)`.
pub fn fit_loglog_slope(rows: &[SummaryRow]) -> Result<LogLogFit> {
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_evals)).collect();
    fit_loglog_points(&points)
}

pub fn fit_loglog_points(points: &[(f64, f64)]) -> Result<LogLogFit> {
    let mut sizes: Vec<f64> = points.iter().map(|p| p.0).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "a slope fit needs at least 3 distinct sizes, got {}",
            sizes.len()
        )));
    }
    if points.iter().any(|&(n, y)| !(n > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParameter("sizes and means must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    // A flat series has no variance to explain; an exact fit still counts as perfect.
    let r_squared = if ss_tot <= f64::EPSILON * k {
        if ss_res <= f64::EPSILON * k {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64) -> f64) -> Vec<SummaryRow> {
        (7..=13)
            .map(|e| {
                let n = 1usize << e;
                SummaryRow::from_runs("x", n, &[(f(n as f64).round() as u64, true)]).unwrap()
            })
            .collect()
    }

    #[test]
    fn summary_statistics() {
        let r = SummaryRow::from_runs("rls", 10, &[(10, true), (20, true), (30, false), (40, true)]).unwrap();
        assert_eq!(r.mean_evals, 25.0);
        assert_eq!(r.median_evals, 25.0);
        let sd = (500.0f64 / 3.0).sqrt();
        assert!((r.std_evals - sd).abs() < 1e-12);
        assert!((r.ci95_high - r.mean_evals - 1.96 * sd / 2.0).abs() < 1e-12);
        assert!(r.ci95_low <= r.mean_evals && r.mean_evals <= r.ci95_high);
        assert_eq!(r.success_rate, 0.75);
        assert_eq!(r.mean_evals_over_n, 2.5);
        assert!(r.censored());
        assert_eq!(r.record().len(), SummaryRow::HEADER.len());
    }

    #[test]
    fn single_replicate_has_degenerate_interval() {
        let r = SummaryRow::from_runs("rls", 16, &[(40, true)]).unwrap();
        assert_eq!(r.std_evals, 0.0);
        assert_eq!((r.ci95_low, r.ci95_high), (40.0, 40.0));
        assert!(SummaryRow::from_runs("rls", 16, &[]).is_err());
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_loglog_slope(&rows(|n| 7.0 * n)).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n_log_n_is_visibly_superlinear() {
        let fit = fit_loglog_slope(&rows(|n| n * n.ln())).unwrap();
        // Offline OLS over 2^7..2^13 gives 1.1478.
        assert!((fit.slope - 1.1478).abs() < 1e-3, "{fit:?}");
        assert!(fit.slope > 1.05);
    }

    #[test]
    fn constant_series() {
        let fit = fit_loglog_slope(&rows(|_| 500.0)).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn too_few_sizes() {
        let mut r = rows(|n| n);
        r.truncate(2);
        assert!(fit_loglog_slope(&r).is_err());
        let dup = vec![r[0].clone(), r[0].clone(), r[1].clone()];
        assert!(fit_loglog_slope(&dup).is_err());
    }

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }
}
