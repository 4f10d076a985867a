//! JSON run configuration (`"schema_version": 1`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::integrator::uniform_times;
use crate::galerkin::{IntegratorSpec, Method};
use crate::model::{ModelParams, PressureMode};
use crate::spectral::{Basis, DomainSpec, SpectralField};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub schema_version: u32,
    pub domain: DomainConfig,
    pub model: ModelConfig,
    pub integrator: IntegratorConfig,
    pub initial_data: InitialData,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub l: f64,
    #[serde(rename = "N")]
    pub modes: usize,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
}

fn default_oversample() -> usize {
    DomainSpec::DEFAULT_OVERSAMPLE
}

/// `"auto"` (`sup u0 + 1`) or an explicit value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Anchor {
    Value(f64),
    Keyword(AnchorKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorKeyword {
    Auto,
}

impl Default for Anchor {
    fn default() -> Self {
        Anchor::Keyword(AnchorKeyword::Auto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub eta: f64,
    #[serde(default)]
    pub pressure_mode: PressureMode,
    #[serde(default)]
    pub entropy_anchor: Anchor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_mobility: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Snapshots {
    Count(usize),
    Times(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub snapshots: Snapshots,
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum InitialData {
    Constant {
        value: f64,
    },
    /// `b + A (1 + cos(pi x / l)) / 2`.
    CosineBump {
        base: f64,
        amplitude: f64,
    },
    /// `floor + A ((1 + cos(pi x / l)) / 2)^power`: a smooth bump whose tails
    /// decay like `(l - |x|)^(2 power)` down to `floor`.
    Droplet {
        amplitude: f64,
        #[serde(default = "default_droplet_power")]
        power: u32,
        #[serde(default = "default_droplet_floor")]
        floor: f64,
    },
    /// Raw spectral coefficients, zero-padded or truncated to `N + 1`.
    Coeffs {
        values: Vec<f64>,
    },
}

fn default_droplet_power() -> u32 {
    4
}

fn default_droplet_floor() -> f64 {
    1e-6
}

impl InitialData {
    /// `P_N u_0`.
    pub fn project(&self, basis: &Basis) -> Result<SpectralField> {
        let l = basis.domain().half_length;
        let pi = std::f64::consts::PI;
        match *self {
            InitialData::Constant { value } => Ok(SpectralField::constant(value, basis.domain())),
            InitialData::CosineBump { base, amplitude } => {
                basis.project_fn(|x| base + amplitude * 0.5 * (1.0 + (pi * x / l).cos()))
            }
            InitialData::Droplet {
                amplitude,
                power,
                floor,
            } => basis.project_fn(|x| {
                floor + amplitude * (0.5 * (1.0 + (pi * x / l).cos())).powi(power as i32)
            }),
            InitialData::Coeffs { ref values } => {
                SpectralField::new(values.clone()).map(|f| f.resized(basis.domain().modes))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "default_r_values")]
    pub r_values: Vec<f64>,
    /// `null` means `1e-7 max(1, ||u0||_inf)`.
    #[serde(default)]
    pub tol_zero: Option<f64>,
    /// `null` means `1e-8 ||u0||_inf`.
    #[serde(default)]
    pub tol_neg: Option<f64>,
    #[serde(default = "default_true")]
    pub holder_probe: bool,
    /// Track `int G_eps(u)`; rejects initial data with infinite entropy.
    #[serde(default = "default_true")]
    pub entropy_tracking: bool,
}

fn default_r_values() -> Vec<f64> {
    vec![1.5, 2.0]
}

fn default_true() -> bool {
    true
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            r_values: default_r_values(),
            tol_zero: None,
            tol_neg: None,
            holder_probe: true,
            entropy_tracking: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

impl Default for SimulationConfig {
    /// The smoke configuration: `N = 16`, `T = 0.1`, smooth positive data.
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            domain: DomainConfig {
                l: 1.0,
                modes: 16,
                oversample: DomainSpec::DEFAULT_OVERSAMPLE,
            },
            model: ModelConfig {
                n: 2.0,
                delta: 0.1,
                epsilon: 0.1,
                eta: 0.0,
                pressure_mode: PressureMode::Nonlinear,
                entropy_anchor: Anchor::default(),
                constant_mobility: None,
            },
            integrator: IntegratorConfig {
                method: Method::Rkf45Adaptive,
                rtol: default_rtol(),
                atol: default_atol(),
                dt: None,
                t_end: 0.1,
                snapshots: Snapshots::Count(10),
            },
            initial_data: InitialData::CosineBump {
                base: 0.5,
                amplitude: 0.5,
            },
            diagnostics: DiagnosticsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.check_schema()?;
        Ok(c)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let c: Self = serde_json::from_value(value)?;
        c.check_schema()?;
        Ok(c)
    }

    fn check_schema(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        DomainSpec::new(self.domain.l, self.domain.modes, self.domain.oversample)
    }

    /// Model parameters; an `"auto"` anchor is left at `NaN` until resolved.
    pub fn model_params(&self) -> ModelParams {
        let m = &self.model;
        ModelParams {
            n: m.n,
            delta: m.delta,
            epsilon: m.epsilon,
            eta: m.eta,
            pressure_mode: m.pressure_mode,
            entropy_anchor: match m.entropy_anchor {
                Anchor::Value(a) => a,
                Anchor::Keyword(_) => f64::NAN,
            },
            constant_mobility: m.constant_mobility,
        }
    }

    pub fn integrator_spec(&self) -> IntegratorSpec {
        let i = &self.integrator;
        let snapshot_times = match &i.snapshots {
            Snapshots::Count(n) => uniform_times(i.t_end, *n),
            Snapshots::Times(t) => t.clone(),
        };
        IntegratorSpec {
            method: i.method,
            dt: i.dt,
            rtol: i.rtol,
            atol: i.atol,
            t_end: i.t_end,
            snapshot_times,
        }
    }
}

/// Sets `path` (dot separated) in a JSON document. The value is parsed as
/// JSON when possible and taken as a string otherwise.
pub fn apply_override(doc: &mut serde_json::Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let value: serde_json::Value =
        serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, key) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("override path `{path}` crosses a non-object")))?;
        if i + 1 == parts.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry(key.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Err(Error::Config("empty override path".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = SimulationConfig::default();
        let s = serde_json::to_string_pretty(&c).unwrap();
        assert!(s.contains("\"N\": 16"));
        assert!(s.contains("\"entropy_anchor\": \"auto\""));
        assert!(s.contains("\"kind\": \"cosine_bump\""));
        assert_eq!(SimulationConfig::from_json(&s).unwrap(), c);
    }

    #[test]
    fn explicit_anchor_and_snapshot_list() {
        let mut v = serde_json::to_value(SimulationConfig::default()).unwrap();
        apply_override(&mut v, "model.entropy_anchor=2.5").unwrap();
        apply_override(&mut v, "integrator.snapshots=[0,0.05,0.1]").unwrap();
        apply_override(&mut v, "model.pressure_mode=linear").unwrap();
        let c = SimulationConfig::from_value(v).unwrap();
        assert_eq!(c.model.entropy_anchor, Anchor::Value(2.5));
        assert_eq!(c.integrator_spec().snapshot_times, vec![0.0, 0.05, 0.1]);
        assert_eq!(c.model.pressure_mode, PressureMode::Linear);
    }

    #[test]
    fn rejects_unknown_schema_and_fields() {
        let mut v = serde_json::to_value(SimulationConfig::default()).unwrap();
        apply_override(&mut v, "schema_version=2").unwrap();
        assert!(SimulationConfig::from_value(v).is_err());
        let mut v = serde_json::to_value(SimulationConfig::default()).unwrap();
        apply_override(&mut v, "model.bogus=1").unwrap();
        assert!(SimulationConfig::from_value(v).is_err());
        assert!(apply_override(&mut serde_json::json!({}), "novalue").is_err());
    }

    #[test]
    fn initial_data_kinds_project_exactly() {
        let b = Basis::new(DomainSpec::new(1.0, 8, 8).unwrap()).unwrap();
        let bump = InitialData::CosineBump {
            base: 0.2,
            amplitude: 1.0,
        }
        .project(&b)
        .unwrap();
        // (1 + cos(pi x)) / 2 = 1/2 - e_2 / 2 with e_2 = -cos(pi x) on l = 1.
        assert!((bump.mean(b.domain()) - 0.7).abs() < 1e-14);
        assert!((bump.coeffs[2] + 0.5).abs() < 1e-14);
        assert!(bump
            .coeffs
            .iter()
            .enumerate()
            .all(|(j, c)| j == 0 || j == 2 || c.abs() < 1e-14));
        let c = InitialData::Coeffs {
            values: vec![1.0, 0.5],
        }
        .project(&b)
        .unwrap();
        assert_eq!(c.len(), 9);
        let d = InitialData::Droplet {
            amplitude: 1.0,
            power: 4,
            floor: 1e-6,
        }
        .project(&b)
        .unwrap();
        assert!(d.coeffs.iter().all(|v| v.is_finite()));
    }
}
