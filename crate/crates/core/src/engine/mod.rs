//! The (1+(λ,λ)) GA, its population-size controllers, and single-offspring baselines.

mod baseline;
mod controller;
mod ga;
mod record;

pub use baseline::{run_baseline, BaselineKind};
pub use controller::{lambda_star, round_lambda, ControlMode, LambdaController};
pub use ga::{
    ga_iteration, run_ga, run_ga_with, GaParams, Incumbent, IterationOutcome, IterationStatus, RateLambda, Workspace,
};
pub use record::{IterationRecord, Recording, RunResult};
