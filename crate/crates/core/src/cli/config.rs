use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{SystemConfig, DEFAULT_ABS_TOL, DEFAULT_MAX_STEPS, DEFAULT_REL_TOL, DEFAULT_SAMPLE_COUNT};
use crate::error::{Error, Result};
use crate::prox::ProxFunction;
use crate::schedule::{default_b0, PolynomialSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    L1,
    ElasticAbs,
    DiagQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// `b0` given explicitly or derived from the coefficient rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum B0Spec {
    Value(f64),
    Auto(Auto),
}

impl Default for B0Spec {
    fn default() -> Self {
        B0Spec::Auto(Auto::Auto)
    }
}

fn one() -> f64 {
    1.0
}

fn default_x0() -> Vec<f64> {
    vec![10.0]
}

fn default_t_end() -> f64 {
    100.0
}

fn default_rel_tol() -> f64 {
    DEFAULT_REL_TOL
}

fn default_abs_tol() -> f64 {
    DEFAULT_ABS_TOL
}

fn default_samples() -> usize {
    DEFAULT_SAMPLE_COUNT
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

/// On-disk experiment description: one flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: ObjectiveName,
    /// Quadratic weights, only for `diag_quadratic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Quadratic center, only for `diag_quadratic`; defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    pub alpha: f64,
    #[serde(default = "one")]
    pub t0: f64,
    #[serde(default = "one")]
    pub lambda0: f64,
    pub l: f64,
    #[serde(default = "one")]
    pub beta0: f64,
    pub m: f64,
    #[serde(default)]
    pub b0: B0Spec,
    pub n: f64,
    #[serde(default = "default_x0")]
    pub x0: Vec<f64>,
    /// Defaults to zero velocity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<Vec<f64>>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub t_end: Option<f64>,
    pub sample_count: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.t_end {
            self.t_end = v;
        }
        if let Some(v) = o.sample_count {
            self.sample_count = v;
        }
        if let Some(v) = o.rel_tol {
            self.rel_tol = v;
        }
        if let Some(v) = o.abs_tol {
            self.abs_tol = v;
        }
    }

    pub fn resolved_b0(&self) -> Result<f64> {
        match self.b0 {
            B0Spec::Value(v) => Ok(v),
            B0Spec::Auto(_) => default_b0(self.alpha, self.m, self.n, self.beta0, self.t0),
        }
    }

    pub fn schedule(&self) -> Result<PolynomialSchedule> {
        PolynomialSchedule::new(
            self.alpha,
            self.t0,
            self.lambda0,
            self.l,
            self.beta0,
            self.m,
            self.resolved_b0()?,
            self.n,
        )
    }

    pub fn objective_function(&self) -> Result<ProxFunction> {
        let d = self.x0.len();
        let extra = self.weights.is_some() || self.center.is_some();
        match self.objective {
            ObjectiveName::L1 | ObjectiveName::ElasticAbs if extra => Err(Error::invalid(
                "weights",
                "only diag_quadratic takes weights or center",
            )),
            ObjectiveName::L1 => ProxFunction::l1(d),
            ObjectiveName::ElasticAbs => ProxFunction::elastic_abs(d),
            ObjectiveName::DiagQuadratic => {
                let weights = self
                    .weights
                    .clone()
                    .ok_or_else(|| Error::invalid("weights", "required for diag_quadratic"))?;
                let center = self.center.clone().unwrap_or_else(|| vec![0.0; weights.len()]);
                ProxFunction::diag_quadratic(weights, center)
            }
        }
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        let objective = self.objective_function()?;
        let u0 = self.u0.clone().unwrap_or_else(|| vec![0.0; self.x0.len()]);
        let cfg = SystemConfig {
            objective,
            schedule: self.schedule()?,
            x0: self.x0.clone(),
            u0,
            t_end: self.t_end,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            sample_count: self.sample_count,
            extra_times: Vec::new(),
            max_steps: self.max_steps,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4}"#;

    #[test]
    fn defaults_and_auto_b0() {
        let c = ExperimentConfig::from_json(FIG1).unwrap();
        assert_eq!(c.b0, B0Spec::Auto(Auto::Auto));
        let s = c.system_config().unwrap();
        assert_eq!(s.schedule.b0, 4.5);
        assert_eq!(s.x0, vec![10.0]);
        assert_eq!(s.u0, vec![0.0]);
        assert_eq!(s.t_end, 100.0);
    }

    #[test]
    fn explicit_b0_and_auto_string() {
        let c = ExperimentConfig::from_json(
            r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "b0": 2.0}"#,
        )
        .unwrap();
        assert_eq!(c.system_config().unwrap().schedule.b0, 2.0);
        let c = ExperimentConfig::from_json(
            r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "b0": "auto"}"#,
        )
        .unwrap();
        assert_eq!(c.b0, B0Spec::Auto(Auto::Auto));
        assert!(ExperimentConfig::from_json(
            r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "b0": "big"}"#
        )
        .is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ExperimentConfig::from_json(
            r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "tend": 5}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("tend"), "{err}");
    }

    #[test]
    fn invalid_values_name_the_field() {
        let mut c = ExperimentConfig::from_json(FIG1).unwrap();
        c.t_end = 0.5;
        let err = c.system_config().unwrap_err();
        assert!(err.to_string().contains("t_end"), "{err}");
        let mut c = ExperimentConfig::from_json(FIG1).unwrap();
        c.u0 = Some(vec![0.0, 1.0]);
        assert!(matches!(c.system_config(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn quadratic_objective() {
        let c = ExperimentConfig::from_json(
            r#"{"objective": "diag_quadratic", "weights": [1, 2], "x0": [1, 1],
                "alpha": 9, "l": 1, "m": 0, "n": 2}"#,
        )
        .unwrap();
        let s = c.system_config().unwrap();
        assert_eq!(s.objective.minimizer(), &[0.0, 0.0]);
        let bad = ExperimentConfig::from_json(
            r#"{"objective": "l1", "weights": [1], "alpha": 9, "l": 1, "m": 0, "n": 2}"#,
        )
        .unwrap();
        assert!(bad.system_config().is_err());
    }

    #[test]
    fn round_trip_preserves_system_config() {
        let mut c = ExperimentConfig::from_json(FIG1).unwrap();
        c.apply(&Overrides {
            t_end: Some(20.0),
            sample_count: Some(64),
            rel_tol: None,
            abs_tol: Some(1e-13),
        });
        let again = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.system_config().unwrap(), c.system_config().unwrap());
    }
}
