//! Replicated experiments, summary statistics and CSV output.

mod config;
pub mod output;
mod runner;
mod stats;
pub mod validation;

pub use config::{Algorithm, ExperimentConfig};
pub use runner::{
    execute, f_sweep, f_sweep_with, run_experiment, run_experiment_with, run_single, static_lambda_grid,
    static_lambda_grid_with, ExperimentReport, GridRow, RunRecord, StudyOptions, SweepRow,
};
pub use stats::{fit_loglog_points, fit_loglog_slope, median, LogLogFit, SummaryRow};
