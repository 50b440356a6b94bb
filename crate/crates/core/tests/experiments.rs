use std::fs;

use lambda_ga::experiment::{
    execute, f_sweep, run_experiment, static_lambda_grid, Algorithm, ExperimentConfig, SummaryRow,
};
use lambda_ga::Execution;

fn rows(algorithm: Algorithm, n_values: &[usize], reps: usize, lambda: Option<f64>) -> Vec<SummaryRow> {
    let mut cfg = ExperimentConfig::new(algorithm, n_values.to_vec());
    cfg.replicates = reps;
    cfg.lambda = lambda;
    cfg.base_seed = 11;
    execute(&cfg, Execution::Parallel).unwrap().rows
}

fn over_n_ln_n(r: &SummaryRow) -> f64 {
    r.mean_evals / (r.n as f64 * (r.n as f64).ln())
}

#[test]
fn one_plus_one_ea_needs_about_e_n_ln_n() {
    for r in rows(Algorithm::OnePlusOneEa, &[256, 512, 1024, 2048, 4096], 100, None) {
        let c = over_n_ln_n(&r);
        assert!((2.2..=3.3).contains(&c), "n={} mean/(n ln n)={c}", r.n);
    }
}

#[test]
fn static_lambda_one_stays_in_an_n_ln_n_band() {
    let rows = rows(Algorithm::GaStatic, &[128, 512, 2048], 60, Some(1.0));
    let c: Vec<f64> = rows.iter().map(over_n_ln_n).collect();
    for &v in &c {
        assert!((3.5..=6.5).contains(&v), "{c:?}");
    }
}

#[test]
fn static_lambda_two_beats_one_and_minimizer_is_small() {
    let grid = static_lambda_grid(1000, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0], 60, 5).unwrap();
    assert!(grid[1].row.mean_evals < grid[0].row.mean_evals);
    let best = grid
        .iter()
        .min_by(|a, b| a.row.mean_evals.total_cmp(&b.row.mean_evals))
        .unwrap();
    assert!(best.lambda <= 8.0, "minimizer {}", best.lambda);
}

#[test]
fn moderate_update_strength_always_solves() {
    let sweep = f_sweep(1000, &[1.5], 5.0, 20, 3).unwrap();
    assert_eq!(sweep[0].row.success_rate, 1.0);
    assert_eq!(sweep[0].cap_occupancy, 0.0);
}

#[test]
fn same_seed_gives_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let snapshot = || -> Vec<(std::path::PathBuf, Vec<u8>)> {
        let mut cfg = ExperimentConfig::new(Algorithm::GaSelfAdjusting, vec![32, 64]);
        cfg.replicates = 3;
        cfg.base_seed = 99;
        cfg.trace = true;
        cfg.output = Some(dir.path().to_path_buf());
        run_experiment(&cfg).unwrap();
        let files: Vec<_> = walk(dir.path())
            .into_iter()
            .map(|p| (p.clone(), fs::read(&p).unwrap()))
            .collect();
        fs::remove_dir_all(dir.path()).unwrap();
        files
    };
    let first = snapshot();
    let second = snapshot();
    assert_eq!(first.len(), 2 + 6);
    assert_eq!(first, second);
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let mut cfg = ExperimentConfig::new(Algorithm::GaFitnessDependent, vec![50, 100]);
    cfg.replicates = 8;
    cfg.base_seed = 2;
    let seq = execute(&cfg, Execution::Sequential).unwrap();
    let par = execute(&cfg, Execution::Parallel).unwrap();
    assert_eq!(seq.rows, par.rows);
    let evals = |r: &lambda_ga::experiment::ExperimentReport| -> Vec<u64> {
        r.runs.iter().map(|x| x.result.total_evals).collect()
    };
    assert_eq!(evals(&seq), evals(&par));
}

#[test]
fn static_with_update_strength_is_rejected_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let mut cfg = ExperimentConfig::new(Algorithm::GaStatic, vec![16]);
    cfg.lambda = Some(2.0);
    cfg.update_strength = Some(1.5);
    cfg.output = Some(out.clone());
    assert!(run_experiment(&cfg).is_err());
    assert!(!out.exists());
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out.sort();
    out
}
