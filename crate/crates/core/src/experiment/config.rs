//! Declarative experiment configs (JSON, one scenario per object).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::metrics::db_to_linear;
use crate::shadowing::{CorrelationMode, IndependentMean, ShadowModel};
use crate::simulate::{Deployment, Scenario, WINDOW_FRACTION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Laplace,
    Coverage,
    Throughput,
    Delay,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    MonteCarlo,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    CellSize,
    ObstacleIntensity,
    Attenuation,
    /// Changes the mean cluster size with `lambda_m lambda_d` held fixed.
    DaughtersMean,
    ClusterRadius,
    Intensity,
    Noise,
    Kappa,
    /// `[obstacle_intensity, segment_length]` pairs.
    Obstacles,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Scalar(f64),
    Pair(f64, f64),
}

impl SweepValue {
    pub fn label(&self) -> String {
        match self {
            SweepValue::Scalar(v) => format!("{v}"),
            SweepValue::Pair(a, b) => format!("{a}/{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<SweepValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl ThetaGrid {
    pub fn values_db(&self) -> Vec<f64> {
        match self {
            ThetaGrid::List(v) => v.clone(),
            ThetaGrid::Range { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| start + k as f64 * step).collect()
            }
        }
    }
}

impl Default for ThetaGrid {
    fn default() -> Self {
        ThetaGrid::Range {
            start: -10.0,
            stop: 20.0,
            step: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySettings {
    #[serde(default)]
    pub theta_db: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

impl Default for DelaySettings {
    fn default() -> Self {
        Self {
            theta_db: 0.0,
            n_max: default_n_max(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    /// Explicit sampling radius.
    pub radius: Option<f64>,
    /// Truncation fraction for the default radius rule.
    pub fraction: Option<f64>,
}

fn default_alpha() -> f64 {
    4.0
}
fn default_link() -> f64 {
    0.5
}
fn default_exclusion() -> f64 {
    0.25
}
fn default_reps() -> usize {
    100_000
}
fn default_seed() -> u64 {
    1
}
fn default_n_max() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub deployment: Deployment,
    pub shadow: ShadowModel,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_link")]
    pub link_distance: f64,
    #[serde(default)]
    pub noise: f64,
    #[serde(default = "default_exclusion")]
    pub exclusion_radius: f64,
    #[serde(default)]
    pub window: WindowSpec,
    pub metric: Metric,
    #[serde(default)]
    pub method: Method,
    /// Rician factor of the serving link; Rayleigh when absent.
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub theta_db: Option<ThetaGrid>,
    #[serde(default)]
    pub s_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub delay: Option<DelaySettings>,
    /// Independent-mode mean rules to run for Boolean shadowing.
    #[serde(default)]
    pub variants: Option<Vec<IndependentMean>>,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// One fully resolved point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub scenario_id: String,
    pub label: String,
    pub scenario: Scenario,
    pub kappa: Option<f64>,
}

impl ExperimentConfig {
    pub fn theta_grid_db(&self) -> Vec<f64> {
        self.theta_db.clone().unwrap_or_default().values_db()
    }

    pub fn delay_settings(&self) -> DelaySettings {
        self.delay.unwrap_or_default()
    }

    fn base_scenario(&self) -> Result<Scenario> {
        let reference_window = || -> Result<Window> {
            if let Some(r) = self.window.radius {
                return Window::new(r);
            }
            let fraction = self.window.fraction.unwrap_or(WINDOW_FRACTION);
            Window::for_truncation(self.alpha, self.exclusion_radius.max(0.5 * self.link_distance), fraction)
        };
        let sc = Scenario {
            deployment: self.deployment,
            shadow: self.shadow,
            mode: CorrelationMode::Correlated,
            alpha: self.alpha,
            link_distance: self.link_distance,
            noise: self.noise,
            window: reference_window()?,
            exclusion_radius: self.exclusion_radius,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Resolves sweep values and Boolean variants into scenarios.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let base = self.base_scenario()?;
        let values: Vec<Option<SweepValue>> = match &self.sweep {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let variants: Vec<Option<IndependentMean>> = match (&self.variants, self.shadow) {
            (Some(v), ShadowModel::Boolean { .. }) => v.iter().copied().map(Some).collect(),
            (Some(_), _) => return Err(Error::Config("`variants` only applies to Boolean shadowing".into())),
            (None, _) => vec![None],
        };
        let mut out = Vec::new();
        for variant in &variants {
            for value in &values {
                let mut sc = base;
                let mut kappa = self.kappa;
                if let Some(v) = value {
                    apply_sweep(&mut sc, &mut kappa, self.sweep.as_ref().map(|s| s.variable).unwrap(), *v)?;
                }
                if let (Some(rule), ShadowModel::Boolean { independent_mean, .. }) = (variant, &mut sc.shadow) {
                    *independent_mean = *rule;
                }
                sc.validate()?;
                let scenario_id = match variant {
                    Some(IndependentMean::Crossing) => format!("{}:crossing", self.scenario),
                    Some(IndependentMean::LengthFree) => format!("{}:length_free", self.scenario),
                    None => self.scenario.clone(),
                };
                out.push(SweepPoint {
                    scenario_id,
                    label: value.map(|v| v.label()).unwrap_or_else(|| "-".into()),
                    scenario: sc,
                    kappa,
                });
            }
        }
        Ok(out)
    }

    /// Range checks beyond what deserialization enforces. Messages are
    /// returned with the name of the offending key.
    pub fn check(&self) -> std::result::Result<(), (String, String)> {
        let bad = |key: &str, msg: String| Err((key.to_string(), msg));
        if self.scenario.trim().is_empty() {
            return bad("scenario", "scenario id must be non-empty".into());
        }
        if self.replications == 0 {
            return bad("replications", "replications must be positive".into());
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return bad("values", "sweep values must be non-empty".into());
            }
            let pairs = s.variable == SweepVariable::Obstacles;
            if s.values.iter().any(|v| matches!(v, SweepValue::Pair(..)) != pairs) {
                return bad(
                    "values",
                    if pairs {
                        "obstacle sweeps take [intensity, length] pairs".into()
                    } else {
                        "this sweep takes scalar values".into()
                    },
                );
            }
        }
        if let Some(grid) = &self.theta_db {
            if let ThetaGrid::Range { step, .. } = grid {
                if !(*step > 0.0) {
                    return bad("theta_db", "theta step must be positive".into());
                }
            }
            let v = grid.values_db();
            if v.is_empty() || v.windows(2).any(|w| w[1] <= w[0]) || v.iter().any(|x| !x.is_finite()) {
                return bad("theta_db", "theta grid must be non-empty and strictly increasing".into());
            }
        }
        if let Some(s) = &self.s_grid {
            if s.is_empty() || s.iter().any(|x| !(*x >= 0.0)) {
                return bad("s_grid", "s grid must be non-empty and non-negative".into());
            }
        }
        if let Some(k) = self.kappa {
            if !(k >= 0.0) {
                return bad("kappa", format!("Rician factor must be non-negative, got {k}"));
            }
        }
        if let Some(d) = &self.delay {
            if d.n_max == 0 {
                return bad("n_max", "n_max must be at least one".into());
            }
        }
        if self.method == Method::Analytic {
            if matches!(self.shadow, ShadowModel::Boolean { .. }) {
                return bad("method", "no analytic transform exists for Boolean shadowing".into());
            }
            if !matches!(self.metric, Metric::Laplace | Metric::Coverage) || self.kappa.is_some() {
                return bad("method", "analytic evaluation covers Laplace and Rayleigh coverage only".into());
            }
        }
        Ok(())
    }
}

fn apply_sweep(sc: &mut Scenario, kappa: &mut Option<f64>, var: SweepVariable, value: SweepValue) -> Result<()> {
    let scalar = || match value {
        SweepValue::Scalar(v) => Ok(v),
        SweepValue::Pair(..) => Err(Error::Config("expected a scalar sweep value".into())),
    };
    let mismatch = |what: &str| Error::Config(format!("sweep variable `{what}` does not apply to this scenario"));
    match var {
        SweepVariable::CellSize => match &mut sc.shadow {
            ShadowModel::Grid { cell_size, .. } => *cell_size = scalar()?,
            _ => return Err(mismatch("cell_size")),
        },
        SweepVariable::ObstacleIntensity => {
            let v = scalar()?;
            match &mut sc.shadow {
                ShadowModel::Grid { obstacle_intensity, .. }
                | ShadowModel::Cluster { obstacle_intensity, .. }
                | ShadowModel::Boolean { obstacle_intensity, .. } => *obstacle_intensity = v,
            }
        }
        SweepVariable::Attenuation => {
            let v = scalar()?;
            match &mut sc.shadow {
                ShadowModel::Grid { attenuation, .. }
                | ShadowModel::Cluster { attenuation, .. }
                | ShadowModel::Boolean { attenuation, .. } => *attenuation = v,
            }
        }
        SweepVariable::DaughtersMean => match &mut sc.deployment {
            Deployment::Matern {
                mother_intensity,
                daughters_mean,
                ..
            } => {
                let v = scalar()?;
                if !(v > 0.0) {
                    return Err(Error::Config(format!("mean daughter count must be positive, got {v}")));
                }
                let density = *mother_intensity * *daughters_mean;
                *daughters_mean = v;
                *mother_intensity = density / v;
            }
            _ => return Err(mismatch("daughters_mean")),
        },
        SweepVariable::ClusterRadius => match &mut sc.deployment {
            Deployment::Matern { cluster_radius, .. } => *cluster_radius = scalar()?,
            _ => return Err(mismatch("cluster_radius")),
        },
        SweepVariable::Intensity => match &mut sc.deployment {
            Deployment::Ppp { intensity } => *intensity = scalar()?,
            _ => return Err(mismatch("intensity")),
        },
        SweepVariable::Noise => sc.noise = scalar()?,
        SweepVariable::Kappa => *kappa = Some(scalar()?),
        SweepVariable::Obstacles => match (&mut sc.shadow, value) {
            (
                ShadowModel::Boolean {
                    obstacle_intensity,
                    segment_length,
                    ..
                },
                SweepValue::Pair(a, b),
            ) => {
                *obstacle_intensity = a;
                *segment_length = b;
            }
            _ => return Err(mismatch("obstacles")),
        },
    }
    Ok(())
}

/// Threshold grid in linear units together with the dB labels.
pub fn theta_pairs(db: &[f64]) -> Vec<(f64, f64)> {
    db.iter().map(|&d| (d, db_to_linear(d))).collect()
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

/// Parses one config object or an array of them.
pub fn parse_configs(text: &str, origin: &str) -> Result<Vec<ExperimentConfig>> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column())))?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    let mut out = Vec::new();
    for item in items {
        let cfg: ExperimentConfig = serde_json::from_value(item).map_err(|e| {
            let msg = e.to_string();
            let line = msg
                .split('`')
                .nth(1)
                .and_then(|key| line_of(text, key))
                .map(|l| format!("{l}"))
                .unwrap_or_else(|| "?".into());
            Error::Config(format!("{origin}:{line}: {msg}"))
        })?;
        cfg.check().map_err(|(key, msg)| {
            let line = line_of(text, &key).map(|l| l.to_string()).unwrap_or_else(|| "?".into());
            Error::Config(format!("{origin}:{line}: {msg}"))
        })?;
        cfg.points().map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{origin}: {m}")),
            Error::Divergence(m) => Error::Divergence(format!("{origin}: {m}")),
            other => Error::Config(format!("{origin}: {other}")),
        })?;
        out.push(cfg);
    }
    if out.is_empty() {
        return Err(Error::Config(format!("{origin}: no experiments defined")));
    }
    Ok(out)
}

pub fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: cannot read config: {e}", path.display())))?;
    parse_configs(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "scenario": "t",
  "deployment": {"kind": "ppp", "intensity": 1.0},
  "shadow": {"kind": "grid", "cell_size": 5.0, "obstacle_intensity": 1.0, "attenuation": 0.1},
  "metric": "coverage",
  "sweep": {"variable": "cell_size", "values": [1, 5, 15]}
}"#;

    #[test]
    fn parses_and_resolves_sweep() {
        let cfgs = parse_configs(MINIMAL, "mem").unwrap();
        let pts = cfgs[0].points().unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[2].label, "15");
        assert!(matches!(pts[2].scenario.shadow, ShadowModel::Grid { cell_size, .. } if cell_size == 15.0));
        assert_eq!(cfgs[0].theta_grid_db().len(), 31);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = MINIMAL.replace("\"metric\"", "\"metrik\": 1,\n  \"metric\"");
        let err = parse_configs(&text, "mem").unwrap_err().to_string();
        assert!(err.contains("mem:5"), "{err}");
        assert!(err.contains("metrik"), "{err}");
    }

    #[test]
    fn bad_theta_grid_is_rejected() {
        let text = MINIMAL.replace("\"metric\"", "\"theta_db\": [0, 0],\n  \"metric\"");
        let err = parse_configs(&text, "mem").unwrap_err().to_string();
        assert!(err.contains("strictly increasing") && err.contains("mem:5"), "{err}");
    }

    #[test]
    fn daughters_sweep_keeps_density() {
        let text = r#"{
  "scenario": "c",
  "deployment": {"kind": "matern", "mother_intensity": 1.0, "daughters_mean": 1.0, "cluster_radius": 1.0},
  "shadow": {"kind": "cluster", "obstacle_intensity": 1.0, "attenuation": 0.1},
  "metric": "throughput",
  "sweep": {"variable": "daughters_mean", "values": [5, 10]}
}"#;
        let pts = parse_configs(text, "mem").unwrap()[0].points().unwrap();
        for p in &pts {
            assert!((p.scenario.deployment.density() - 1.0).abs() < 1e-12);
        }
    }
}
