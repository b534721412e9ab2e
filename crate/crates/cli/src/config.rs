//! Run configuration: a flat JSON object with defaults, overrides and validation.

use std::f64::consts::PI;
use std::path::Path;

use amoeba_engine::{AmoebaMetric, BiasKind, BiasSpec, MetricKind};
use pde_solver::{ForceMode, PdeParams};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricName {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasName {
    None,
    FixedOffset,
    Quantile,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeMode {
    Gac,
    Selfsnakes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceName {
    None,
    Constant,
    Modulated,
    Shrinkage,
}

/// All tunable parameters. Each subcommand reads the subset it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub metric: MetricName,
    pub beta: f64,
    pub rho: f64,
    pub iterations: usize,
    /// Keep every n-th iterate; 0 keeps only the final one.
    pub snapshot_every: usize,
    pub bias: BiasName,
    /// `b`, `q` or `r`, or the force coefficient `γ` when `bias_gamma` is set.
    pub bias_value: f64,
    pub bias_gamma: bool,
    /// Initial level set: a PGM path, `circle:cx,cy,r` or `rect:x0,y0,x1,y1`.
    pub u0: Option<String>,
    pub pde_mode: PdeMode,
    pub lambda: f64,
    pub tau: f64,
    pub k: f64,
    pub k_bar: f64,
    pub sigma: f64,
    pub force_mode: ForceName,
    /// Angles of the coefficient curves, in radians.
    pub alphas: Vec<f64>,
    pub s_min: f64,
    pub s_max: f64,
    pub s_count: usize,
    /// Multiply the curves by `(3/2)ν(s sin α)`.
    pub scaled: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            metric: MetricName::L2,
            beta: 1.0,
            rho: 3.0,
            iterations: 10,
            snapshot_every: 0,
            bias: BiasName::None,
            bias_value: 0.0,
            bias_gamma: false,
            u0: None,
            pde_mode: PdeMode::Gac,
            lambda: 1.0,
            tau: 0.25,
            k: 0.0,
            k_bar: 0.0,
            sigma: 0.0,
            force_mode: ForceName::None,
            alphas: vec![0.0, PI / 6.0, PI / 3.0, PI / 2.0],
            s_min: 0.0,
            s_max: 3.0,
            s_count: 61,
            scaled: true,
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Parses a `key=value` override. The value is read as JSON, falling back to a string.
pub fn parse_override(s: &str) -> anyhow::Result<(String, Value)> {
    let (key, raw) = s.split_once('=').ok_or_else(|| usage(format!("override `{s}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.trim().to_string(), value))
}

impl Config {
    /// Builds a config from an optional file and `key=value` overrides.
    ///
    /// The file may be a plain config object or a run manifest, whose `config` entry is used.
    pub fn load(path: Option<&Path>, overrides: &[(String, Value)]) -> anyhow::Result<Self> {
        let mut obj = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))?;
                match v {
                    Value::Object(mut m) if m.contains_key("subcommand") && m.contains_key("config") => {
                        match m.remove("config") {
                            Some(Value::Object(c)) => c,
                            _ => return Err(usage("manifest key `config` is not an object")),
                        }
                    }
                    Value::Object(m) => m,
                    _ => return Err(usage("config must be a JSON object")),
                }
            }
            None => Map::new(),
        };
        for (k, v) in overrides {
            obj.insert(k.clone(), v.clone());
        }
        let cfg: Config = serde_json::from_value(Value::Object(obj)).map_err(|e| usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks that name the offending key.
    pub fn validate(&self) -> anyhow::Result<()> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(usage(format!("config key `{key}`: {v} is not positive")))
            }
        };
        let nonneg = |key: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(usage(format!("config key `{key}`: {v} is negative or not finite")))
            }
        };
        positive("beta", self.beta)?;
        positive("rho", self.rho)?;
        positive("lambda", self.lambda)?;
        positive("tau", self.tau)?;
        nonneg("k_bar", self.k_bar)?;
        nonneg("sigma", self.sigma)?;
        if self.iterations == 0 {
            return Err(usage("config key `iterations`: must be at least 1"));
        }
        if !self.k.is_finite() {
            return Err(usage("config key `k`: must be finite"));
        }
        if !self.bias_value.is_finite() {
            return Err(usage("config key `bias_value`: must be finite"));
        }
        if self.bias == BiasName::Quantile && !self.bias_gamma && !(self.bias_value > 0.0 && self.bias_value < 1.0) {
            return Err(usage(format!("config key `bias_value`: quantile {} outside (0, 1)", self.bias_value)));
        }
        if self.alphas.iter().any(|a| !a.is_finite()) {
            return Err(usage("config key `alphas`: entries must be finite"));
        }
        if !(self.s_min.is_finite() && self.s_min >= 0.0) {
            return Err(usage(format!("config key `s_min`: {} is negative or not finite", self.s_min)));
        }
        if !(self.s_max.is_finite() && self.s_max >= self.s_min) {
            return Err(usage(format!("config key `s_max`: {} is below s_min", self.s_max)));
        }
        if self.s_count < 2 {
            return Err(usage("config key `s_count`: must be at least 2"));
        }
        Ok(())
    }

    pub fn amoeba_metric(&self) -> AmoebaMetric {
        let kind = match self.metric {
            MetricName::L1 => MetricKind::L1,
            MetricName::L2 => MetricKind::L2,
        };
        AmoebaMetric { kind, beta: self.beta }
    }

    pub fn bias_spec(&self) -> BiasSpec {
        let kind = match self.bias {
            BiasName::None => BiasKind::None,
            BiasName::FixedOffset => BiasKind::FixedOffset,
            BiasName::Quantile => BiasKind::Quantile,
            BiasName::Quadratic => BiasKind::Quadratic,
        };
        BiasSpec { kind, value: self.bias_value, gamma_mode: self.bias_gamma }
    }

    pub fn pde_params(&self) -> PdeParams {
        let force_mode = match self.force_mode {
            ForceName::None => ForceMode::None,
            ForceName::Constant => ForceMode::Constant,
            ForceName::Modulated => ForceMode::Modulated,
            ForceName::Shrinkage => ForceMode::Shrinkage,
        };
        PdeParams { lambda: self.lambda, tau: self.tau, k: self.k, k_bar: self.k_bar, sigma: self.sigma, force_mode }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn over(pairs: &[&str]) -> Vec<(String, Value)> {
        pairs.iter().map(|s| parse_override(s).unwrap()).collect()
    }

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn overrides_are_typed() {
        let c = Config::load(None, &over(&["rho=5", "metric=l1", "u0=circle:1,2,3", "alphas=[0,1]"])).unwrap();
        assert_eq!(c.rho, 5.0);
        assert_eq!(c.metric, MetricName::L1);
        assert_eq!(c.u0.as_deref(), Some("circle:1,2,3"));
        assert_eq!(c.alphas, vec![0.0, 1.0]);
    }

    #[test]
    fn errors_name_the_key() {
        let e = Config::load(None, &over(&["rho=0"])).unwrap_err();
        assert!(e.is::<UsageError>() && e.to_string().contains("rho"), "{e}");
        let e = Config::load(None, &over(&["radius=3"])).unwrap_err();
        assert!(e.to_string().contains("radius"), "{e}");
        let e = Config::load(None, &over(&["metric=l7"])).unwrap_err();
        assert!(e.to_string().contains("l7"), "{e}");
    }

    #[test]
    fn manifest_config_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(&p, r#"{"subcommand":"amf","config":{"rho":4.5,"beta":0.2},"duration_secs":1.0}"#).unwrap();
        let c = Config::load(Some(&p), &[]).unwrap();
        assert_eq!((c.rho, c.beta), (4.5, 0.2));
    }

    #[test]
    fn round_trips_through_json() {
        let c = Config::load(None, &over(&["bias=quantile", "bias_value=0.3", "force_mode=shrinkage"])).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        let back: Config = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }
}
