use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{BaselineKind, ControlMode, GaParams};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    GaStatic,
    GaFitnessDependent,
    GaSelfAdjusting,
    OnePlusOneEa,
    Rls,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Self::GaStatic,
        Self::GaFitnessDependent,
        Self::GaSelfAdjusting,
        Self::OnePlusOneEa,
        Self::Rls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GaStatic => "ga-static",
            Self::GaFitnessDependent => "ga-fitness-dependent",
            Self::GaSelfAdjusting => "ga-self-adjusting",
            Self::OnePlusOneEa => "one-plus-one-ea",
            Self::Rls => "rls",
        }
    }

    pub fn baseline(self) -> Option<BaselineKind> {
        match self {
            Self::OnePlusOneEa => Some(BaselineKind::OnePlusOneEa),
            Self::Rls => Some(BaselineKind::Rls),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|a| a.name()).collect();
            Error::InvalidConfig(format!("unknown algorithm {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

fn default_replicates() -> usize {
    1
}

fn default_budget_factor() -> u64 {
    GaParams::DEFAULT_BUDGET_FACTOR
}

/// One experiment: an algorithm run `replicates` times at each size in `n_values`.
///
/// Deserializes from TOML:
///
/// ```toml
/// algorithm = "ga-self-adjusting"
/// n_values = [128, 256, 512]
/// replicates = 100
/// F = 1.5
/// r = 5
/// base_seed = 7
/// output = "out/self-adjusting"
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub n_values: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Update strength of the self-adjusting rule.
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub update_strength: Option<f64>,
    /// Success-rule denominator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Fixed λ for `ga-static`, initial λ for `ga-self-adjusting`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default = "default_budget_factor")]
    pub budget_factor: u64,
    #[serde(default)]
    pub base_seed: u64,
    /// Output directory; nothing is written when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub trace: bool,
    /// Derive `p` and `c` from the rounded offspring count instead of the real λ.
    #[serde(default)]
    pub rounded_rates: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, n_values: Vec<usize>) -> Self {
        Self {
            algorithm,
            n_values,
            replicates: 1,
            update_strength: None,
            r: None,
            lambda: None,
            budget_factor: default_budget_factor(),
            base_seed: 0,
            output: None,
            trace: false,
            rounded_rates: false,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Output {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Rejects parameter combinations that do not apply to the algorithm.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.n_values.is_empty() {
            return bad("n_values must not be empty".into());
        }
        if self.n_values[0] == 0 {
            return bad("problem sizes must be positive".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n_values must be strictly increasing, got {:?}", self.n_values));
        }
        if self.base_seed > i64::MAX as u64 {
            return bad("base_seed must fit a signed 64-bit TOML integer".into());
        }
        if self.budget_factor == 0 {
            return bad("budget_factor must be at least 1".into());
        }
        let name = self.algorithm.name();
        let max_n = *self.n_values.last().expect("nonempty");
        let min_n = self.n_values[0];
        match self.algorithm {
            Algorithm::GaStatic => {
                if self.update_strength.is_some() || self.r.is_some() {
                    return bad(format!("{name} takes no F or r"));
                }
                match self.lambda {
                    None => return bad(format!("{name} requires lambda")),
                    Some(l) if !(l.is_finite() && l >= 1.0 && l <= min_n as f64) => {
                        return bad(format!("lambda must lie in [1, {min_n}], got {l}"));
                    }
                    Some(_) => {}
                }
            }
            Algorithm::GaFitnessDependent => {
                if self.update_strength.is_some() || self.r.is_some() || self.lambda.is_some() {
                    return bad(format!("{name} takes no F, r or lambda"));
                }
            }
            Algorithm::GaSelfAdjusting => {
                if let Some(f) = self.update_strength {
                    if !(f.is_finite() && f > 1.0) {
                        return bad(format!("F must be a finite real > 1, got {f}"));
                    }
                }
                if let Some(r) = self.r {
                    if !(r.is_finite() && r >= 2.0) {
                        return bad(format!("r must be a finite real >= 2, got {r}"));
                    }
                }
                if let Some(l) = self.lambda {
                    if !(l.is_finite() && l >= 1.0 && l <= min_n as f64) {
                        return bad(format!("initial lambda must lie in [1, {min_n}], got {l}"));
                    }
                }
            }
            Algorithm::OnePlusOneEa | Algorithm::Rls => {
                if self.update_strength.is_some() || self.r.is_some() || self.lambda.is_some() {
                    return bad(format!("{name} takes no F, r or lambda"));
                }
                if self.rounded_rates {
                    return bad(format!("rounded_rates does not apply to {name}"));
                }
            }
        }
        if (max_n as u64).checked_mul(self.budget_factor).is_none() {
            return bad("budget_factor · n overflows".into());
        }
        Ok(())
    }

    pub fn budget(&self, n: usize) -> u64 {
        self.budget_factor.saturating_mul(n as u64)
    }

    /// Controller mode for the GA variants; `None` for baselines.
    pub fn control_mode(&self) -> Option<ControlMode> {
        match self.algorithm {
            Algorithm::GaStatic => Some(ControlMode::Static {
                lambda: self.lambda.unwrap_or(1.0),
            }),
            Algorithm::GaFitnessDependent => Some(ControlMode::FitnessDependent),
            Algorithm::GaSelfAdjusting => Some(ControlMode::SelfAdjusting),
            Algorithm::OnePlusOneEa | Algorithm::Rls => None,
        }
    }
}
