use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lambda_ga::experiment::output::{self, Table};
use lambda_ga::experiment::validation::{self, OracleRow};
use lambda_ga::experiment::{
    f_sweep_with, fit_loglog_points, run_experiment_with, static_lambda_grid_with, Algorithm, ExperimentConfig,
    StudyOptions,
};
use lambda_ga::Execution;

#[derive(Parser, Debug)]
#[command(name = "lambda-ga", version, about = "Experiments with the (1+(λ,λ)) GA on OneMax")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Replicated runs from a TOML config; flags override file values.
    Run(RunArgs),
    /// One summary row per static λ.
    Grid(GridArgs),
    /// One summary row per update strength F of the self-adjusting GA.
    SweepF(SweepArgs),
    /// Monte-Carlo checks of per-iteration success probabilities.
    Oracle(OracleArgs),
    /// Log-log slope of mean evaluations against n from an existing CSV.
    Fit(FitArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Independent replicates per configuration.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Budget is this factor times n evaluations.
    #[arg(long = "budget-factor")]
    budget_factor: Option<u64>,
    /// Run replicates on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn study(&self, default_reps: usize) -> StudyOptions {
        let mut opts = StudyOptions::new(self.reps.unwrap_or(default_reps), self.seed.unwrap_or(0));
        if let Some(b) = self.budget_factor {
            opts.budget_factor = b;
        }
        opts.execution = self.execution();
        opts
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML file with ExperimentConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Option<Algorithm>,
    #[arg(long = "F")]
    update_strength: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Static λ, or the initial λ of the self-adjusting GA.
    #[arg(long)]
    lambda: Option<f64>,
    /// Output directory for summary.csv, manifest.toml and traces/.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one trace CSV per run.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Static λ values, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0])]
    lambda: Vec<f64>,
    /// CSV file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Update strengths, comma separated.
    #[arg(long = "F", value_delimiter = ',', default_values_t = [1.2, 1.5, 2.0, 3.0])]
    update_strength: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    r: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    MutationPhase,
    CrossoverPhase,
    IterationSuccess,
    Drift,
    All,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(value_enum, default_value_t = OracleKind::All)]
    kind: OracleKind,
    /// Monte-Carlo samples per cell.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Problem size for the iteration-success states.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Multiplier on λ* for the iteration-success states.
    #[arg(long, default_value_t = 8.0)]
    multiplier: f64,
    /// Steps of each drift walk.
    #[arg(long, default_value_t = 1_000_000)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// CSV with algorithm, n and mean_evals columns.
    #[arg(long)]
    input: PathBuf,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: lambda_ga::Error| e.to_string())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Grid(args) => grid(args),
        Command::SweepF(args) => sweep(args),
        Command::Oracle(args) => oracle(args),
        Command::Fit(args) => fit(args),
    }
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            ExperimentConfig::from_path(path).with_context(|| format!("reading config {}", path.display()))?
        }
        None => {
            let (Some(algo), Some(n)) = (args.algo, args.n.clone()) else {
                bail!("run needs --config, or both --algo and --n");
            };
            ExperimentConfig::new(algo, n)
        }
    };
    if let Some(a) = args.algo {
        cfg.algorithm = a;
    }
    if let Some(n) = &args.n {
        cfg.n_values = n.clone();
    }
    if let Some(v) = args.common.reps {
        cfg.replicates = v;
    }
    if args.update_strength.is_some() {
        cfg.update_strength = args.update_strength;
    }
    if args.r.is_some() {
        cfg.r = args.r;
    }
    if args.lambda.is_some() {
        cfg.lambda = args.lambda;
    }
    if let Some(b) = args.common.budget_factor {
        cfg.budget_factor = b;
    }
    if let Some(s) = args.common.seed {
        cfg.base_seed = s;
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    if args.trace {
        cfg.trace = true;
    }
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = build_config(&args)?;
    let report = run_experiment_with(&cfg, args.common.execution())?;
    match &cfg.output {
        Some(dir) => {
            eprintln!("wrote {}", dir.join(output::SUMMARY_FILE).display());
            Ok(())
        }
        None => emit(&output::summary_table(&report.rows), None),
    }
}

fn grid(args: GridArgs) -> Result<()> {
    let rows = static_lambda_grid_with(args.n, &args.lambda, &args.common.study(100))?;
    emit(&output::grid_table(&rows), args.out.as_deref())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let rows = f_sweep_with(args.n, &args.update_strength, args.r, &args.common.study(50))?;
    emit(&output::sweep_table(&rows), args.out.as_deref())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let wants = |k: OracleKind| args.kind == k || args.kind == OracleKind::All;
    let mut rows: Vec<OracleRow> = Vec::new();
    if wants(OracleKind::MutationPhase) {
        rows.extend(validation::mutation_rows(args.samples, args.seed)?);
    }
    if wants(OracleKind::CrossoverPhase) {
        rows.extend(validation::crossover_rows(args.samples, args.seed)?);
    }
    if wants(OracleKind::IterationSuccess) {
        rows.extend(validation::success_rows(
            args.n,
            args.multiplier,
            args.samples,
            args.seed,
        )?);
    }
    if wants(OracleKind::Drift) {
        rows.extend(validation::drift_rows(
            &[0.1, 0.2, 0.31],
            &[3.0, 5.0],
            args.steps,
            args.seed,
        )?);
    }
    emit(&OracleRow::table(&rows), args.out.as_deref())?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks outside tolerance", rows.len());
    }
    Ok(())
}

fn fit(args: FitArgs) -> Result<()> {
    let means = output::read_means(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (algo, n, mean) in means {
        groups.entry(algo).or_default().push((n as f64, mean));
    }
    if groups.is_empty() {
        bail!("{} has no rows", args.input.display());
    }
    let mut table = Table {
        header: vec!["algorithm", "points", "slope", "intercept", "r_squared"],
        rows: Vec::new(),
    };
    for (algo, points) in &groups {
        let fit = fit_loglog_points(points).with_context(|| format!("fitting {algo}"))?;
        table.rows.push(vec![
            algo.clone(),
            points.len().to_string(),
            fit.slope.to_string(),
            fit.intercept.to_string(),
            fit.r_squared.to_string(),
        ]);
    }
    emit(&table, None)
}

/// Writes `table` to `path`, or to stdout when no path is given.
fn emit(table: &Table, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => table.write(p)?,
        None => table.write_to(io::stdout().lock())?,
    }
    Ok(())
}
