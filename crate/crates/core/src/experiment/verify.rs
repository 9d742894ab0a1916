//! The `verify` command: property suites with measured margins.
//!
//! A positive margin means the property holds with room to spare.

use serde::{Deserialize, Serialize};

use super::run::analytic_transform;
use crate::analytic::{check_ordering, GridParams, GridTransform};
use crate::error::{Error, Result};
use crate::metrics::{
    db_to_linear, delay_tail_from_probabilities, paired_difference, shannon_throughput,
    success_probabilities, LinkModel,
};
use crate::shadowing::{CorrelationMode, ShadowModel};
use crate::simulate::{
    empirical_laplace, interference_values, moments_from_samples, Deployment, MetricEstimate, Scenario,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Ordering,
    Moments,
    Convergence,
    CrossValidation,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordering" => Ok(Suite::Ordering),
            "moments" => Ok(Suite::Moments),
            "convergence" => Ok(Suite::Convergence),
            "cross-validation" | "cross_validation" => Ok(Suite::CrossValidation),
            other => Err(Error::Config(format!(
                "unknown suite `{other}` (expected ordering, moments, convergence or cross-validation)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub suite: String,
    pub property: String,
    pub passed: bool,
    pub margin: f64,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub replications: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            replications: 20_000,
            seed: 1,
        }
    }
}

/// Grid scenario with the usual parameters (lambda = 1, K = 0.1,
/// lambda_b = 1, alpha = 4).
pub fn grid_scenario(cell_size: f64) -> Result<Scenario> {
    Scenario::new(
        Deployment::Ppp { intensity: 1.0 },
        ShadowModel::Grid {
            cell_size,
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        },
        CorrelationMode::Correlated,
        4.0,
    )
}

/// Cluster scenario with `lambda_m lambda_d = 1` and unit cluster radius.
pub fn cluster_scenario(daughters_mean: f64) -> Result<Scenario> {
    Scenario::new(
        Deployment::Matern {
            mother_intensity: 1.0 / daughters_mean,
            daughters_mean,
            cluster_radius: 1.0,
        },
        ShadowModel::Cluster {
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        },
        CorrelationMode::Correlated,
        4.0,
    )
}

fn theta_grid() -> Vec<f64> {
    (-10..=20).map(|d| db_to_linear(d as f64)).collect()
}

struct Recorder {
    suite: &'static str,
    out: Vec<PropertyResult>,
}

impl Recorder {
    fn add(&mut self, property: impl Into<String>, margin: f64, detail: impl Into<String>) {
        self.out.push(PropertyResult {
            suite: self.suite.into(),
            property: property.into(),
            passed: margin >= 0.0,
            margin,
            detail: detail.into(),
        });
    }
}

/// Smallest `diff + sigmas * stderr` over paired differences.
fn paired_margin(diffs: &[MetricEstimate], sigmas: f64) -> f64 {
    diffs
        .iter()
        .map(|d| d.value + sigmas * d.stderr)
        .fold(f64::INFINITY, f64::min)
}

fn ordering(opts: VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let scenarios = [("grid delta=15", grid_scenario(15.0)?), ("cluster lambda_d=10", cluster_scenario(10.0)?)];
    for (name, sc) in scenarios {
        let t = analytic_transform(&sc)?;
        let s_grid: Vec<f64> = theta_grid().iter().map(|&th| sc.link_argument(th)).collect();
        let cor = t.curve(&s_grid, CorrelationMode::Correlated)?;
        let ind = t.curve(&s_grid, CorrelationMode::Independent)?;
        let rep = check_ordering(&cor, &ind)?;
        rec.add(format!("{name}: analytic L_cor >= L_ind"), -rep.worst_excess, format!("worst violation {:.3e}", rep.worst_violation));

        let reps = opts.replications;
        let i_cor = interference_values(&sc.with_mode(CorrelationMode::Correlated), reps, opts.seed)?;
        let i_ind = interference_values(&sc.with_mode(CorrelationMode::Independent), reps, opts.seed)?;
        let link = LinkModel::of(&sc);
        let diffs = theta_grid()
            .iter()
            .map(|&th| {
                let s = sc.link_argument(th);
                let a: Vec<f64> = i_cor.iter().map(|i| (-s * (sc.noise + i)).exp()).collect();
                let b: Vec<f64> = i_ind.iter().map(|i| (-s * (sc.noise + i)).exp()).collect();
                paired_difference(&a, &b)
            })
            .collect::<Vec<_>>();
        rec.add(format!("{name}: coverage_cor >= coverage_ind (3 sigma)"), paired_margin(&diffs, 3.0), format!("{reps} paired replications"));

        let tp = |xs: &[f64]| -> Vec<f64> {
            xs.iter()
                .map(|&i| shannon_throughput(&[i], &link, sc.noise).value)
                .collect()
        };
        let d = paired_difference(&tp(&i_cor), &tp(&i_ind));
        rec.add(
            format!("{name}: throughput_cor >= throughput_ind (3 sigma)"),
            d.value + 3.0 * d.stderr,
            format!("gap {:.4} +- {:.4}", d.value, d.stderr),
        );

        let p_cor = success_probabilities(&sc.with_mode(CorrelationMode::Correlated), 1.0, reps, opts.seed)?;
        let p_ind = success_probabilities(&sc.with_mode(CorrelationMode::Independent), 1.0, reps, opts.seed)?;
        let mut diffs = Vec::new();
        let (mut q_cor, mut q_ind) = (vec![1.0; reps], vec![1.0; reps]);
        for _ in 0..100 {
            for k in 0..reps {
                q_cor[k] *= 1.0 - p_cor[k];
                q_ind[k] *= 1.0 - p_ind[k];
            }
            diffs.push(paired_difference(&q_ind, &q_cor));
        }
        let tail = delay_tail_from_probabilities(&p_cor, 100);
        rec.add(
            format!("{name}: delay tail_cor <= tail_ind for n <= 100 (3 sigma)"),
            paired_margin(&diffs, 3.0),
            format!("P[L>1] correlated {:.4}", tail.tail[0]),
        );
    }
    Ok(())
}

fn moments(opts: VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let cases = [
        ("grid delta=1", grid_scenario(1.0)?),
        ("grid delta=5", grid_scenario(5.0)?),
        ("cluster lambda_d=5", cluster_scenario(5.0)?),
    ];
    for (name, sc) in cases {
        let (cor, ind, gap) = analytic_moments(&sc)?;
        let rel = ((cor.mean - ind.mean) / cor.mean).abs();
        rec.add(format!("{name}: mean_cor == mean_ind"), 1e-6 - rel, format!("relative difference {rel:.2e}"));
        rec.add(format!("{name}: var_cor >= var_ind"), cor.variance - ind.variance, format!("{:.6} vs {:.6}", cor.variance, ind.variance));
        let gap_rel = ((cor.variance - ind.variance) - gap).abs() / gap.abs().max(1e-300);
        rec.add(format!("{name}: var gap == lambda^2 sum var[T] J^2"), 1e-4 - gap_rel, format!("relative mismatch {gap_rel:.2e}"));
        for (mode, analytic) in [(CorrelationMode::Correlated, cor), (CorrelationMode::Independent, ind)] {
            let xs = interference_values(&sc.with_mode(mode), opts.replications, opts.seed)?;
            let m = moments_from_samples(&xs);
            let zm = (m.mean.value - analytic.mean).abs() / m.mean.stderr;
            rec.add(format!("{name} {mode}: MC mean within 3 sigma"), 3.0 - zm, format!("mc {:.5} analytic {:.5}", m.mean.value, analytic.mean));
            let zv = (m.variance.value - analytic.variance).abs() / m.variance.stderr;
            rec.add(
                format!("{name} {mode}: MC variance within 3 sigma"),
                3.0 - zv,
                format!("mc {:.5} analytic {:.5}", m.variance.value, analytic.variance),
            );
        }
    }
    Ok(())
}

/// Analytic (correlated, independent, variance gap) for a scenario; the
/// Monte Carlo window truncation is matched by nothing, so the window
/// should be large relative to the exclusion radius.
fn analytic_moments(sc: &Scenario) -> Result<(crate::analytic::MomentPair, crate::analytic::MomentPair, f64)> {
    match (sc.deployment, sc.shadow) {
        (
            Deployment::Ppp { intensity },
            ShadowModel::Grid {
                cell_size,
                obstacle_intensity,
                attenuation,
            },
        ) => {
            let t = GridTransform::new(
                GridParams::new(intensity, sc.alpha, cell_size, obstacle_intensity, attenuation)
                    .with_exclusion(sc.exclusion_radius),
            )?;
            Ok((t.moments(CorrelationMode::Correlated)?, t.moments(CorrelationMode::Independent)?, t.variance_gap()?))
        }
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
        ) => {
            let t = crate::analytic::ClusterTransform::new(
                crate::analytic::ClusterParams::new(
                    mother_intensity,
                    daughters_mean,
                    cluster_radius,
                    sc.alpha,
                    obstacle_intensity,
                    attenuation,
                )
                .with_exclusion(sc.exclusion_radius),
            )?;
            Ok((t.moments(CorrelationMode::Correlated)?, t.moments(CorrelationMode::Independent)?, t.variance_gap()?))
        }
        _ => Err(Error::Unsupported("no analytic moments for this scenario".into())),
    }
}

fn convergence(_opts: VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let mut gaps = Vec::new();
    for &delta in &[15.0, 5.0, 1.0, 0.2] {
        let t = GridTransform::new(GridParams::new(1.0, 4.0, delta, 1.0, 0.1).with_exclusion(0.25))?;
        gaps.push((delta, t.variance_gap()?));
    }
    let margin = gaps.windows(2).map(|w| w[0].1 - w[1].1).fold(f64::INFINITY, f64::min);
    let detail = gaps.iter().map(|(d, g)| format!("{d}:{g:.4e}")).collect::<Vec<_>>().join(" ");
    rec.add("grid variance gap decreases along delta 15 > 5 > 1 > 0.2", margin, detail);

    let s0 = 0.5f64.powi(4);
    let mut cov = Vec::new();
    for &delta in &[1.0, 5.0, 15.0] {
        let t = analytic_transform(&grid_scenario(delta)?.with_exclusion(0.0)?)?;
        cov.push((delta, t.laplace(s0, CorrelationMode::Correlated)? - t.laplace(s0, CorrelationMode::Independent)?));
    }
    let margin = cov.windows(2).map(|w| w[1].1 - w[0].1).fold(f64::INFINITY, f64::min);
    let detail = cov.iter().map(|(d, g)| format!("{d}:{g:.4e}")).collect::<Vec<_>>().join(" ");
    rec.add("grid coverage gap at 0 dB increases along delta 1 < 5 < 15", margin, detail);

    let mut cov = Vec::new();
    for &ld in &[1.0, 5.0, 10.0] {
        let t = analytic_transform(&cluster_scenario(ld)?.with_exclusion(0.0)?)?;
        cov.push((ld, t.laplace(s0, CorrelationMode::Correlated)? - t.laplace(s0, CorrelationMode::Independent)?));
    }
    let margin = cov.windows(2).map(|w| w[1].1 - w[0].1).fold(f64::INFINITY, f64::min);
    let detail = cov.iter().map(|(d, g)| format!("{d}:{g:.4e}")).collect::<Vec<_>>().join(" ");
    rec.add("cluster coverage gap at 0 dB increases along lambda_d 1 < 5 < 10", margin, detail);
    Ok(())
}

/// Window with `1e-4` truncation fraction, wide enough that the missing
/// far field stays well below the Monte Carlo error.
pub fn wide(sc: Scenario) -> Result<Scenario> {
    let mut sc = sc;
    sc.window = crate::geometry::Window::for_truncation(sc.alpha, sc.exclusion_radius.max(0.5 * sc.link_distance), 1e-4)?;
    Ok(sc)
}

fn cross_validation(opts: VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let s_grid = [0.0625, 0.625, 6.25];
    let mut cases = Vec::new();
    for &d in &[1.0, 5.0, 15.0] {
        cases.push((format!("grid delta={d}"), wide(grid_scenario(d)?)?));
    }
    for &ld in &[1.0, 5.0, 10.0] {
        cases.push((format!("cluster lambda_d={ld}"), wide(cluster_scenario(ld)?)?));
    }
    for (name, sc) in cases {
        let t = analytic_transform(&sc)?;
        for mode in CorrelationMode::BOTH {
            let mc = empirical_laplace(&sc.with_mode(mode), &s_grid, opts.replications, opts.seed)?;
            let mut worst: f64 = 0.0;
            for (i, &s) in s_grid.iter().enumerate() {
                let a = t.laplace(s, mode)?;
                let z = (a - mc.values[i]).abs() / (mc.error_at(i).hypot(t.tolerance()));
                worst = worst.max(z);
            }
            rec.add(format!("{name} {mode}: analytic vs empirical Laplace within 3 stderr"), 3.0 - worst, format!("max |z| = {worst:.2}"));
        }
    }
    Ok(())
}

pub fn verify(suite: Suite, opts: VerifyOptions) -> Result<Vec<PropertyResult>> {
    let mut rec = Recorder {
        suite: match suite {
            Suite::Ordering => "ordering",
            Suite::Moments => "moments",
            Suite::Convergence => "convergence",
            Suite::CrossValidation => "cross-validation",
        },
        out: Vec::new(),
    };
    match suite {
        Suite::Ordering => ordering(opts, &mut rec)?,
        Suite::Moments => moments(opts, &mut rec)?,
        Suite::Convergence => convergence(opts, &mut rec)?,
        Suite::CrossValidation => cross_validation(opts, &mut rec)?,
    }
    Ok(rec.out)
}
