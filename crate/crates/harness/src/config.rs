//! Run configuration and its JSON form.

use std::path::{Path, PathBuf};

use lfsgd::{OptimizerConfig, ProblemConfig, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

pub const MONITOR_NAMES: [&str; 3] = ["step_displacement", "lr_ratio", "boundedness"];

/// Thresholds used by the named monitors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorSettings {
    /// Final-decile mean of the windowed displacement must not exceed this.
    pub displacement_threshold: f64,
    /// Window length in steps; `None` means one epoch.
    pub displacement_window: Option<usize>,
    pub lr_ratio_tolerance: f64,
    /// Boundedness radius is that of the level set `{f ≤ multiplier · f(x_0)}`.
    pub level_multiplier: f64,
}

impl Default for MonitorSettings {
    fn default() -> Self {
        Self {
            displacement_threshold: 1e-3,
            displacement_window: None,
            lr_ratio_tolerance: 1e-2,
            level_multiplier: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub optimizer: OptimizerConfig,
    pub sampler: SamplerConfig,
    pub epochs: u64,
    pub seed: u64,
    pub monitors: Vec<String>,
    pub monitor_settings: MonitorSettings,
    /// Keep every s-th step in trace.csv.
    pub record_every: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemConfig::by_name("lad").expect("lad is registered"),
            optimizer: OptimizerConfig::default(),
            sampler: SamplerConfig::default(),
            epochs: 100,
            seed: 0,
            monitors: Vec::new(),
            monitor_settings: MonitorSettings::default(),
            record_every: 1,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::config("config", e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks what can be checked without building the problem.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.epochs == 0 {
            return Err(HarnessError::config("epochs", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(HarnessError::config("record_every", "must be at least 1"));
        }
        for name in &self.monitors {
            if !MONITOR_NAMES.contains(&name.as_str()) {
                return Err(HarnessError::config(
                    "monitors",
                    format!("unknown monitor `{name}`; expected one of {MONITOR_NAMES:?}"),
                ));
            }
        }
        let s = &self.monitor_settings;
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(HarnessError::config(
                    field,
                    format!("must be finite and positive, got {v}"),
                ))
            }
        };
        positive(
            "monitor_settings.displacement_threshold",
            s.displacement_threshold,
        )?;
        positive("monitor_settings.lr_ratio_tolerance", s.lr_ratio_tolerance)?;
        positive("monitor_settings.level_multiplier", s.level_multiplier)?;
        if s.displacement_window == Some(0) {
            return Err(HarnessError::config(
                "monitor_settings.displacement_window",
                "must be at least 1",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_fills_defaults() {
        let c =
            RunConfig::from_json(r#"{"problem": {"name": "pwnc", "n": 4}, "epochs": 3}"#).unwrap();
        assert_eq!(c.problem.name(), "pwnc");
        assert_eq!(c.epochs, 3);
        assert_eq!(c.optimizer, OptimizerConfig::default());
    }

    #[test]
    fn unknown_fields_and_names_rejected() {
        assert!(RunConfig::from_json(r#"{"epoch": 3}"#).is_err());
        assert!(RunConfig::from_json(r#"{"problem": {"name": "rosenbrock"}}"#).is_err());
        let mut c = RunConfig::default();
        c.monitors = vec!["oracle".into()];
        let err = c.validate().unwrap_err();
        assert_eq!(err.field(), Some("monitors"));
    }

    #[test]
    fn roundtrip() {
        let mut c = RunConfig::default();
        c.monitors = MONITOR_NAMES.iter().map(|s| s.to_string()).collect();
        c.out = Some("runs/a".into());
        let back = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
