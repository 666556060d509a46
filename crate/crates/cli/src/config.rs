//! JSON run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempograd::automata::{parse_hoa, translate_fragment, Ldba};
use tempograd::bundled;
use tempograd::envs::{AnyEnv, EnvConfig, ParkingParams};
use tempograd::ltl::parse_ltl;
use tempograd::trainer::{PolicyConfig, Task, TrainConfig, TrainError};

use crate::error::CliError;

/// Grid of constant actions for `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start: 0.5,
            stop: 9.5,
            step: 0.5,
        }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        // Round to the step's decimals so printed values are stable.
        (0..=n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_env")]
    pub env: EnvConfig,
    /// LTL text; mutually exclusive with `hoa`.
    #[serde(default)]
    pub formula: Option<String>,
    /// Path to an HOA automaton, relative to the config file.
    #[serde(default)]
    pub hoa: Option<PathBuf>,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_env() -> EnvConfig {
    EnvConfig::Parking(ParkingParams::default())
}

impl RunConfig {
    /// Parse JSON, reporting the path of the offending key on failure.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Validation(format!("config error at '{path}': {}", e.inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let (Some(h), Some(dir)) = (&cfg.hoa, path.parent()) {
            if h.is_relative() {
                cfg.hoa = Some(dir.join(h));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.formula.is_some() && self.hoa.is_some() {
            return Err(CliError::Validation(
                "config error at 'formula': give either 'formula' or 'hoa', not both".into(),
            ));
        }
        if let Err(e) = self.train.validate() {
            return Err(match e {
                TrainError::Config { key, reason } => {
                    CliError::Validation(format!("config error at 'train.{key}': {reason}"))
                }
                other => CliError::Validation(other.to_string()),
            });
        }
        let s = &self.sweep;
        if !(s.step > 0.0) || !(s.stop >= s.start) {
            return Err(CliError::Validation(
                "config error at 'sweep': need step > 0 and stop >= start".into(),
            ));
        }
        Ok(())
    }

    /// Automaton from `hoa`, else `formula`, else the parking formula.
    pub fn automaton(&self) -> Result<Ldba, CliError> {
        if let Some(path) = &self.hoa {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            return parse_hoa(&text).map_err(|e| CliError::Validation(e.to_string()));
        }
        let text = self.formula.as_deref().unwrap_or(bundled::PARKING_FORMULA);
        let f = parse_ltl(text).map_err(|e| CliError::Validation(e.to_string()))?;
        translate_fragment(&f).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn task(&self) -> Result<Task<AnyEnv>, CliError> {
        let env = self
            .env
            .build()
            .map_err(|e| CliError::Validation(format!("config error at 'env': {e}")))?;
        let overrides: BTreeMap<String, f64> = self.train.tau_overrides.clone();
        Task::new(env, self.automaton()?, self.train.tau, &overrides)
            .map_err(|e| CliError::Validation(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_describe_the_parking_study() {
        let c = RunConfig::from_json("{}").unwrap();
        assert!(matches!(c.env, EnvConfig::Parking(_)));
        assert_eq!(c.sweep.grid().len(), 19);
        assert_eq!(c.sweep.grid()[18], 9.5);
        assert!(c.task().is_ok());
    }

    #[test]
    fn error_names_the_key() {
        let e = RunConfig::from_json(r#"{"train": {"gama": 0.9}}"#).unwrap_err();
        assert!(e.to_string().contains("train"), "{e}");
        let e = RunConfig::from_json(r#"{"env": {"name": "parking", "dt": "fast"}}"#).unwrap_err();
        assert!(e.to_string().contains("env"), "{e}");
        let e = RunConfig::from_json(r#"{"train": {"gamma": 1.5}}"#).unwrap_err();
        assert!(e.to_string().contains("train.gamma"), "{e}");
        let e = RunConfig::from_json(r#"{"formula": "G\"a>0\"", "hoa": "x.hoa"}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unbound_signal_is_a_validation_error() {
        let c = RunConfig::from_json(r#"{"formula": "F\"torso_z>1\""}"#).unwrap();
        assert_eq!(c.task().unwrap_err().exit_code(), 2);
    }
}
