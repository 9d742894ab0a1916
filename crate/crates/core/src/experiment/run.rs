//! The `run` command: executes every sweep point under both modes with
//! common random numbers and collects result rows.

use std::path::{Path, PathBuf};

use super::config::{load_configs, theta_pairs, ExperimentConfig, Method, Metric};
use super::csv::{write_csv, ResultRow};
use crate::analytic::{ClusterParams, ClusterTransform, GridParams, GridTransform, InterferenceTransform};
use crate::error::{Error, Result};
use crate::metrics::{
    coverage_rayleigh, coverage_rayleigh_samples, coverage_rician, local_delay_tail, shannon_throughput, LinkModel,
};
use crate::shadowing::{CorrelationMode, ShadowModel};
use crate::simulate::{interference_values, Deployment, Scenario};

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

/// Analytic transform matching a grid or cluster scenario, including its
/// exclusion radius. Boolean shadowing has none.
pub fn analytic_transform(sc: &Scenario) -> Result<Box<dyn InterferenceTransform + Send + Sync>> {
    match (sc.deployment, sc.shadow) {
        (
            Deployment::Ppp { intensity },
            ShadowModel::Grid {
                cell_size,
                obstacle_intensity,
                attenuation,
            },
        ) => Ok(Box::new(GridTransform::new(
            GridParams::new(intensity, sc.alpha, cell_size, obstacle_intensity, attenuation)
                .with_exclusion(sc.exclusion_radius),
        )?)),
        (
            Deployment::Matern {
                mother_intensity,
                daughters_mean,
                cluster_radius,
            },
            ShadowModel::Cluster {
                obstacle_intensity,
                attenuation,
            },
        ) => Ok(Box::new(ClusterTransform::new(
            ClusterParams::new(
                mother_intensity,
                daughters_mean,
                cluster_radius,
                sc.alpha,
                obstacle_intensity,
                attenuation,
            )
            .with_exclusion(sc.exclusion_radius),
        )?)),
        _ => Err(Error::Unsupported(
            "analytic transforms exist for PPP/grid and Matern/cluster scenarios only".into(),
        )),
    }
}

/// Executes one config and returns its rows and summary lines.
pub fn execute(cfg: &ExperimentConfig, ov: &Overrides) -> Result<(Vec<ResultRow>, Vec<String>)> {
    let seed = ov.seed.unwrap_or(cfg.seed);
    let reps = ov.replications.unwrap_or(cfg.replications);
    let thetas = theta_pairs(&cfg.theta_grid_db());
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for point in cfg.points()? {
        let transform = match cfg.method {
            Method::Analytic => Some(analytic_transform(&point.scenario)?),
            Method::MonteCarlo => None,
        };
        for mode in CorrelationMode::BOTH {
            let sc = point.scenario.with_mode(mode);
            let link = match point.kappa {
                Some(k) => LinkModel::rician(k, sc.link_distance, sc.alpha),
                None => LinkModel::of(&sc),
            };
            let mut push = |x: f64, estimate: f64, error: f64, n: usize| {
                rows.push(ResultRow {
                    scenario: point.scenario_id.clone(),
                    mode: mode.to_string(),
                    sweep: point.label.clone(),
                    x,
                    estimate,
                    error,
                    reps: n,
                    seed,
                })
            };
            let head = format!("{} sweep={} {mode}", point.scenario_id, point.label);
            match (cfg.metric, &transform) {
                (Metric::Laplace, Some(t)) => {
                    let s_grid = s_grid(cfg, &sc, &thetas);
                    for &s in &s_grid {
                        push(s, t.laplace(s, mode)?, t.tolerance(), 0);
                    }
                    summary.push(format!("{head}: analytic Laplace at {} points", s_grid.len()));
                }
                (Metric::Coverage, Some(t)) => {
                    let mut at0 = f64::NAN;
                    for &(db, theta) in &thetas {
                        let c = coverage_rayleigh(t.as_ref(), mode, theta, &link, sc.noise)?;
                        if db == 0.0 {
                            at0 = c;
                        }
                        push(db, c, t.tolerance(), 0);
                    }
                    summary.push(format!("{head}: analytic coverage(0 dB) = {at0:.6}"));
                }
                (Metric::Delay, None) => {
                    let d = cfg.delay_settings();
                    let theta = crate::metrics::db_to_linear(d.theta_db);
                    let tail = local_delay_tail(&sc, theta, d.n_max, reps, seed)?;
                    for (i, &n) in tail.n_grid.iter().enumerate() {
                        push(n as f64, tail.tail[i], tail.tail_stderr[i], reps);
                    }
                    summary.push(format!(
                        "{head}: P[L>1] = {:.5}, P[L>{}] = {:.3e}, E[1/p] = {:.4}{}",
                        tail.tail[0],
                        d.n_max,
                        tail.censored_mass,
                        tail.mean_inverse.value,
                        if tail.heavy_tail { " (heavy tail: mean delay unreliable)" } else { "" }
                    ));
                }
                (metric, None) => {
                    let samples = interference_values(&sc, reps, seed)?;
                    match metric {
                        Metric::Laplace => {
                            let s_grid = s_grid(cfg, &sc, &thetas);
                            let curve = crate::simulate::laplace_from_samples(&samples, &s_grid);
                            for (i, &s) in s_grid.iter().enumerate() {
                                push(s, curve.values[i], curve.error_at(i), reps);
                            }
                            summary.push(format!("{head}: empirical Laplace at {} points", s_grid.len()));
                        }
                        Metric::Coverage => {
                            let mut at0 = None;
                            for &(db, theta) in &thetas {
                                let e = if point.kappa.is_some() {
                                    coverage_rician(&samples, theta, &link, sc.noise)?
                                } else {
                                    coverage_rayleigh_samples(&samples, theta, &link, sc.noise)?
                                };
                                if db == 0.0 {
                                    at0 = Some(e);
                                }
                                push(db, e.value, e.stderr, reps);
                            }
                            if let Some(e) = at0 {
                                summary.push(format!("{head}: coverage(0 dB) = {:.6} +- {:.2e}", e.value, e.stderr));
                            } else {
                                summary.push(format!("{head}: coverage over {} thresholds", thetas.len()));
                            }
                        }
                        Metric::Throughput => {
                            let e = shannon_throughput(&samples, &LinkModel::of(&sc), sc.noise);
                            push(0.0, e.value, e.stderr, reps);
                            summary.push(format!("{head}: throughput = {:.4} +- {:.4} bit/s/Hz", e.value, e.stderr));
                        }
                        Metric::Delay => unreachable!(),
                    }
                }
                (_, Some(_)) => {
                    return Err(Error::Config("analytic evaluation covers Laplace and coverage only".into()));
                }
            }
        }
    }
    Ok((rows, summary))
}

fn s_grid(cfg: &ExperimentConfig, sc: &Scenario, thetas: &[(f64, f64)]) -> Vec<f64> {
    cfg.s_grid
        .clone()
        .unwrap_or_else(|| thetas.iter().map(|&(_, t)| sc.link_argument(t)).collect())
}

fn default_output(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.scenario)))
}

/// Loads `path`, executes every experiment in it and writes CSV. With an
/// output override all rows go to that single file.
pub fn run(path: &Path, ov: &Overrides) -> Result<RunReport> {
    let configs = load_configs(path)?;
    let mut all = Vec::new();
    let mut summary = Vec::new();
    let mut outputs = Vec::new();
    for cfg in &configs {
        let (rows, lines) = execute(cfg, ov)?;
        summary.extend(lines);
        if ov.output.is_none() {
            let out = default_output(cfg);
            write_csv(&out, &rows)?;
            outputs.push(out);
        }
        all.extend(rows);
    }
    if let Some(out) = &ov.output {
        write_csv(out, &all)?;
        outputs.push(out.clone());
    }
    Ok(RunReport {
        rows: all,
        summary,
        outputs,
    })
}
