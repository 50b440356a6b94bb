//! CSV and manifest writers. Every CSV has a header row and `\n` line endings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::engine::IterationRecord;
use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::runner::{ExperimentReport, GridRow, SweepRow};
use super::stats::SummaryRow;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const TRACE_DIR: &str = "traces";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Output {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn csv_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

/// A header plus string records, ready to be written as CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_to<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv_writer(sink);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(io_err(path))?;
        self.write_to(file).map_err(|e| match e {
            Error::Io(source) => Error::Output {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }
}

pub fn summary_table(rows: &[SummaryRow]) -> Table {
    Table {
        header: SummaryRow::HEADER.to_vec(),
        rows: rows.iter().map(SummaryRow::record).collect(),
    }
}

/// Summary columns followed by `lambda`.
pub fn grid_table(rows: &[GridRow]) -> Table {
    let mut header = SummaryRow::HEADER.to_vec();
    header.push("lambda");
    Table {
        header,
        rows: rows
            .iter()
            .map(|g| {
                let mut rec = g.row.record();
                rec.push(g.lambda.to_string());
                rec
            })
            .collect(),
    }
}

/// Summary columns followed by `F`, `r` and `cap_occupancy`.
pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut header = SummaryRow::HEADER.to_vec();
    header.extend(["F", "r", "cap_occupancy"]);
    Table {
        header,
        rows: rows
            .iter()
            .map(|s| {
                let mut rec = s.row.record();
                rec.push(s.update_strength.to_string());
                rec.push(s.success_ratio.to_string());
                rec.push(s.cap_occupancy.to_string());
                rec
            })
            .collect(),
    }
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    summary_table(rows).write(path)
}

/// Columns: iter, lambda_real, lambda_int, ell, fitness_before, fitness_after, success, evals_cum.
pub fn write_trace(path: &Path, trace: &[IterationRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv_writer(file);
    if trace.is_empty() {
        w.write_record([
            "iter",
            "lambda_real",
            "lambda_int",
            "ell",
            "fitness_before",
            "fitness_after",
            "success",
            "evals_cum",
        ])?;
    }
    for rec in trace {
        w.serialize(rec)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Reads `(algorithm, n, mean_evals)` from any CSV with those columns.
pub fn read_means(path: &Path) -> Result<Vec<(String, usize, f64)>> {
    #[derive(serde::Deserialize)]
    struct Row {
        algorithm: String,
        n: usize,
        mean_evals: f64,
    }
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize::<Row>()
        .map(|row| {
            let row = row?;
            Ok((row.algorithm, row.n, row.mean_evals))
        })
        .collect()
}

#[derive(Serialize)]
struct Manifest<'a> {
    library: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    sizes: Vec<SizeEntry>,
    runs: Vec<RunEntry>,
}

#[derive(Serialize)]
struct SizeEntry {
    n: usize,
    /// Some replicate hit the budget, so `mean_evals` is a lower bound.
    censored: bool,
}

#[derive(Serialize)]
struct RunEntry {
    n: usize,
    replicate: usize,
    /// Hex, since TOML integers are signed 64-bit.
    seed: String,
    evaluations: u64,
    found_optimum: bool,
}

pub fn trace_file_name(algorithm: &str, n: usize, replicate: usize) -> String {
    format!("{algorithm}_n{n}_rep{replicate}.csv")
}

pub fn manifest_string(report: &ExperimentReport) -> Result<String> {
    let manifest = Manifest {
        library: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: &report.config,
        sizes: report
            .rows
            .iter()
            .map(|r| SizeEntry {
                n: r.n,
                censored: r.censored(),
            })
            .collect(),
        runs: report
            .runs
            .iter()
            .map(|r| RunEntry {
                n: r.n,
                replicate: r.replicate,
                seed: format!("{:#018x}", r.seed),
                evaluations: r.result.total_evals,
                found_optimum: r.result.found_optimum,
            })
            .collect(),
    };
    Ok(toml::to_string(&manifest)?)
}

/// Writes summary, manifest and traces under `dir`; returns the paths written.
pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<Vec<PathBuf>> {
    prepare_dir(dir)?;
    let mut written = Vec::new();
    let summary = dir.join(SUMMARY_FILE);
    write_summary(&summary, &report.rows)?;
    written.push(summary);

    let manifest = dir.join(MANIFEST_FILE);
    fs::write(&manifest, manifest_string(report)?).map_err(io_err(&manifest))?;
    written.push(manifest);

    if report.config.trace {
        let traces = dir.join(TRACE_DIR);
        prepare_dir(&traces)?;
        for run in &report.runs {
            let path = traces.join(trace_file_name(report.config.algorithm.name(), run.n, run.replicate));
            write_trace(&path, &run.result.trace)?;
            written.push(path);
        }
    }
    Ok(written)
}
