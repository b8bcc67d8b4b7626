//! JSON scenario configuration.
//!
//! ```json
//! { "version": 1, "model": "vdw", "n": 3, "C5": 240 }
//! ```
//!
//! Every other field has a default; unknown fields are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::homentropic::{constants_from_model, entropy_from_c5, ConstraintConstants};
use crate::thermo::{ModelKind, ThermoModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn default_n() -> f64 {
    3.0
}
fn default_r() -> f64 {
    1.0
}
fn default_c2() -> f64 {
    1.0
}
fn default_alpha1() -> f64 {
    1.0
}
fn default_alpha2() -> f64 {
    2.0
}
fn default_alpha3() -> f64 {
    1.0
}
fn default_samples() -> usize {
    2000
}
fn default_times() -> Vec<f64> {
    vec![0.0, 30.0]
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_seed() -> u64 {
    1
}
fn default_isotherms() -> Vec<f64> {
    vec![0.8, 0.85, 0.9, 0.95, 1.0, 1.1, 1.2]
}
fn default_binodal_t_min() -> f64 {
    0.3
}
fn default_binodal_count() -> usize {
    50
}
fn default_front_samples() -> usize {
    200
}

/// The file as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub model: ModelKind,
    #[serde(default = "default_n")]
    pub n: f64,
    /// Gas constant; ignored by the reduced van der Waals model.
    #[serde(rename = "R", default = "default_r")]
    pub gas_constant: f64,
    #[serde(default)]
    pub s0: Option<f64>,
    #[serde(rename = "C5", default)]
    pub c5: Option<f64>,
    #[serde(rename = "C2", default = "default_c2")]
    pub c2: f64,
    #[serde(default = "default_alpha1")]
    pub alpha1: f64,
    #[serde(default = "default_alpha2")]
    pub alpha2: f64,
    #[serde(default = "default_alpha3")]
    pub alpha3: f64,
    /// Defaults to `[0.01, 2.95]` for van der Waals and `[0.05, 10]` for the
    /// ideal gas.
    #[serde(default)]
    pub rho_range: Option<[f64; 2]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// End of the shock front and phase curve; defaults to `t* + 20`.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_isotherms")]
    pub isotherm_temperatures: Vec<f64>,
    #[serde(default = "default_binodal_t_min")]
    pub binodal_t_min: f64,
    #[serde(default = "default_binodal_count")]
    pub binodal_count: usize,
    #[serde(default = "default_front_samples")]
    pub front_samples: usize,
}

/// A validated configuration with the derived model and constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub model: ThermoModel,
    pub s0: f64,
    pub consts: ConstraintConstants,
    pub rho_range: (f64, f64),
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The van der Waals scenario with `n = 3`, `C5 = 240`.
    pub fn reference() -> Self {
        Self::from_json(r#"{"version": 1, "model": "vdw", "C5": 240}"#)
            .expect("reference config parses")
    }

    pub fn resolve(self) -> Result<Scenario, ConfigError> {
        let invalid = |msg: String| ConfigError::Invalid(msg);
        if self.version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        let model = match self.model {
            ModelKind::VanDerWaals => ThermoModel::van_der_waals(self.n),
            ModelKind::Ideal => ThermoModel::ideal(self.n, self.gas_constant),
        }
        .map_err(|e| invalid(e.to_string()))?;
        let s0 = match (self.s0, self.c5) {
            (Some(s0), None) => s0,
            (None, Some(c5)) => entropy_from_c5(&model, c5).map_err(|e| invalid(e.to_string()))?,
            _ => return Err(invalid("exactly one of s0 and C5 must be given".into())),
        };
        if !s0.is_finite() {
            return Err(invalid(format!("s0 = {s0} is not finite")));
        }
        let consts =
            constants_from_model(&model, s0, self.c2, self.alpha1, self.alpha2, self.alpha3)
                .map_err(|e| invalid(e.to_string()))?;
        let [lo, hi] = self.rho_range.unwrap_or(match self.model {
            ModelKind::VanDerWaals => [0.01, 2.95],
            ModelKind::Ideal => [0.05, 10.0],
        });
        if !(lo < hi) {
            return Err(invalid(format!(
                "rho_range [{lo}, {hi}] must be increasing"
            )));
        }
        for rho in [lo, hi] {
            model
                .check_density(rho)
                .map_err(|e| invalid(format!("rho_range: {e}")))?;
        }
        if self.samples < 2 {
            return Err(invalid("samples must be at least 2".into()));
        }
        if self.front_samples == 0 || self.binodal_count == 0 {
            return Err(invalid(
                "front_samples and binodal_count must be positive".into(),
            ));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(invalid("times must be finite".into()));
        }
        if let Some(t) = self.t_max {
            if !t.is_finite() {
                return Err(invalid("t_max must be finite".into()));
            }
        }
        if self
            .isotherm_temperatures
            .iter()
            .any(|t| !(*t > 0.0 && t.is_finite()))
        {
            return Err(invalid("isotherm temperatures must be positive".into()));
        }
        if !(self.binodal_t_min > 0.0 && self.binodal_t_min <= 1.0) {
            return Err(invalid("binodal_t_min must lie in (0, 1]".into()));
        }
        Ok(Scenario {
            config: self,
            model,
            s0,
            consts,
            rho_range: (lo, hi),
        })
    }
}
