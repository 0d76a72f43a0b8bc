//! The JSON run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tracetails::bounds::Method;
use tracetails::extremal::{AbsFamily, Family, RelFamily};
use tracetails::trace_estimator::ErrorMode;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Bounds,
    Samplesize,
    Verify,
    Estimate,
    Worstcase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Relative { mu: f64 },
    Absolute { lam: f64, phi: f64 },
}

impl FamilySpec {
    pub fn family(&self) -> Result<Family, String> {
        match *self {
            FamilySpec::Relative { mu } => RelFamily::new(mu).map(Family::Relative),
            FamilySpec::Absolute { lam, phi } => AbsFamily::new(lam, phi).map(Family::Absolute),
        }
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Relative,
    Absolute,
    Probe,
}

/// Every key any subcommand understands. Keys a subcommand does not use are
/// ignored by it; keys nobody knows are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: Option<u32>,
    pub command: Option<CommandName>,
    pub family: Option<FamilySpec>,
    pub m: Option<usize>,
    pub epsilon: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub epsilon_grid: Option<GridSpec>,
    pub grid_points: Option<usize>,
    pub delta: Option<f64>,
    pub method: Option<Method>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub spectrum: Option<Vec<f64>>,
    pub error_mode: Option<ErrorMode>,
    pub suite: Option<Suite>,
    pub pairs: Option<usize>,
    pub ms: Option<Vec<usize>>,
    pub extra_dims: Option<usize>,
    pub t_points: Option<usize>,
    pub x_points: Option<usize>,
    pub cells_per_sd: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub force: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        if let Some(v) = config.schema_version {
            if v != SCHEMA_VERSION {
                return Err(format!("unsupported schema_version {v}; expected {SCHEMA_VERSION}"));
            }
        }
        Ok(config)
    }

    pub fn check_command(&self, name: CommandName) -> Result<(), String> {
        match self.command {
            Some(c) if c != name => Err(format!("config is for command {c:?}, not {name:?}")),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> Result<Family, String> {
        self.family.ok_or("missing key: family")?.family()
    }

    pub fn m(&self) -> Result<usize, String> {
        match self.m {
            Some(0) => Err("m must be at least 1".into()),
            Some(m) => Ok(m),
            None => Err("missing key: m".into()),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

pub fn require<T: Copy>(v: Option<T>, key: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("missing key: {key}"))
}
