//! The (1+(λ,λ)) genetic algorithm on generalized OneMax.
//!
//! Static, fitness-dependent and self-adjusting population sizes, the
//! (1+1) EA and RLS baselines, Monte-Carlo validators for per-iteration
//! success probabilities, and an experiment runner that writes CSV.

pub mod bitstring;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod onemax;
pub mod oracles;
pub mod parallel;
pub mod rng;
pub mod variation;

pub use bitstring::{random_bitstring, BitString};
pub use engine::{
    lambda_star, round_lambda, run_baseline, run_ga, BaselineKind, ControlMode, GaParams, IterationRecord,
    LambdaController, RateLambda, Recording, RunResult,
};
pub use error::{Error, Result};
pub use onemax::{FitnessValue, Objective, OneMaxInstance, Transformed};
pub use parallel::Execution;
