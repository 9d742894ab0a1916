//! Monte Carlo engine.
//!
//! A replication is keyed by `(master seed, replication index)`; the
//! pattern, obstacles, cell-level counts and fading of a replication are
//! the same under both correlation modes, so switching `mode` on a
//! [`Scenario`] yields paired samples.

use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{CurveError, LaplaceCurve};
use crate::error::{ensure, Error, Result};
use crate::geometry::{sample_matern, sample_ppp, sample_segments, PointPattern, SegmentSet, Window};
use crate::rng::{Purpose, Seed};
use crate::shadowing::{assign_boolean, assign_cluster, assign_grid, CorrelationMode, ShadowModel, ShadowedPattern};

/// Relative truncation error of the unshadowed mean interference used to
/// size default windows.
pub const WINDOW_FRACTION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Deployment {
    Ppp {
        intensity: f64,
    },
    Matern {
        mother_intensity: f64,
        daughters_mean: f64,
        cluster_radius: f64,
    },
}

impl Deployment {
    pub fn density(&self) -> f64 {
        match *self {
            Deployment::Ppp { intensity } => intensity,
            Deployment::Matern {
                mother_intensity,
                daughters_mean,
                ..
            } => mother_intensity * daughters_mean,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub deployment: Deployment,
    pub shadow: ShadowModel,
    pub mode: CorrelationMode,
    pub alpha: f64,
    /// Distance to the serving station, which is not part of the pattern.
    pub link_distance: f64,
    pub noise: f64,
    pub window: Window,
    pub exclusion_radius: f64,
}

impl Scenario {
    /// Defaults: link distance 0.5, no noise, exclusion radius 0.25 and a
    /// window from [`Scenario::default_window`].
    pub fn new(deployment: Deployment, shadow: ShadowModel, mode: CorrelationMode, alpha: f64) -> Result<Self> {
        let link_distance = 0.5;
        let exclusion_radius = 0.25;
        let window = Self::default_window(alpha, link_distance, exclusion_radius)?;
        let sc = Self {
            deployment,
            shadow,
            mode,
            alpha,
            link_distance,
            noise: 0.0,
            window,
            exclusion_radius,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Disk beyond which the unshadowed mean interference from
    /// `|x| >= max(exclusion, d_link / 2)` loses at most
    /// [`WINDOW_FRACTION`] of its value.
    pub fn default_window(alpha: f64, link_distance: f64, exclusion_radius: f64) -> Result<Window> {
        let reference = exclusion_radius.max(0.5 * link_distance);
        Window::for_truncation(alpha, reference, WINDOW_FRACTION)
    }

    pub fn with_mode(mut self, mode: CorrelationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    /// Sets the exclusion radius and resizes the window accordingly.
    pub fn with_exclusion(mut self, radius: f64) -> Result<Self> {
        self.exclusion_radius = radius;
        self.window = Self::default_window(self.alpha, self.link_distance, radius)?;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) {
            return Err(Error::Divergence(format!(
                "aggregate interference is infinite for path-loss exponent {} <= 2",
                self.alpha
            )));
        }
        ensure(self.link_distance > 0.0 && self.link_distance.is_finite(), || {
            format!("link distance must be positive, got {}", self.link_distance)
        })?;
        ensure(self.noise >= 0.0 && self.noise.is_finite(), || {
            format!("noise must be non-negative, got {}", self.noise)
        })?;
        ensure(self.exclusion_radius >= 0.0 && self.exclusion_radius.is_finite(), || {
            format!("exclusion radius must be non-negative, got {}", self.exclusion_radius)
        })?;
        match self.deployment {
            Deployment::Ppp { intensity } => ensure(intensity >= 0.0 && intensity.is_finite(), || {
                format!("intensity must be non-negative, got {intensity}")
            })?,
            Deployment::Matern {
                mother_intensity,
                daughters_mean,
                cluster_radius,
            } => ensure(
                mother_intensity >= 0.0 && daughters_mean >= 0.0 && cluster_radius > 0.0,
                || "Matern parameters must be non-negative with a positive radius".into(),
            )?,
        }
        if matches!(self.shadow, ShadowModel::Cluster { .. }) && !matches!(self.deployment, Deployment::Matern { .. }) {
            return Err(Error::Parameter("cluster shadowing needs a Matern deployment".into()));
        }
        self.shadow.validate()
    }

    /// `theta * d_link^alpha`: the Laplace argument of a Rayleigh link.
    pub fn link_argument(&self, theta: f64) -> f64 {
        theta * self.link_distance.powf(self.alpha)
    }
}

/// One interference realization together with what produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceSample {
    pub value: f64,
    pub shadowed: ShadowedPattern,
    /// Per-point power fading.
    pub fading: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub value: f64,
    pub stderr: f64,
    pub replications: usize,
}

impl MetricEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                value: f64::NAN,
                stderr: f64::NAN,
                replications: 0,
            };
        }
        let mean = pairwise_sum(xs) / n as f64;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        Self {
            value: mean,
            stderr: (var / n as f64).sqrt(),
            replications: n,
        }
    }
}

/// Fixed-order pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Runs `f` for replications `0..n` in parallel; results come back in
/// replication order.
pub fn replicate<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..n as u64).into_par_iter().map(&f).collect()
}

fn sample_pattern(sc: &Scenario, seed: Seed) -> Result<PointPattern> {
    match sc.deployment {
        Deployment::Ppp { intensity } => sample_ppp(intensity, sc.window, seed),
        Deployment::Matern {
            mother_intensity,
            daughters_mean,
            cluster_radius,
        } => sample_matern(mother_intensity, daughters_mean, cluster_radius, sc.window, seed),
    }
}

/// Pattern with attenuations for one replication.
pub fn sample_shadowed(sc: &Scenario, seed: Seed) -> Result<ShadowedPattern> {
    let pattern = sample_pattern(sc, seed)?;
    match sc.shadow {
        ShadowModel::Grid { .. } => assign_grid(&pattern, &sc.shadow, sc.mode, seed),
        ShadowModel::Cluster { .. } => assign_cluster(&pattern, &sc.shadow, sc.mode, seed),
        ShadowModel::Boolean {
            obstacle_intensity,
            segment_length,
            ..
        } => {
            let segments = if sc.mode == CorrelationMode::Correlated {
                sample_segments(obstacle_intensity, segment_length, sc.window, seed)?
            } else {
                SegmentSet::empty(segment_length)
            };
            assign_boolean(&pattern, &segments, &sc.shadow, sc.mode, seed)
        }
    }
}

fn draw_fading(n: usize, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng(Purpose::Fading);
    (0..n).map(|_| Exp1.sample(&mut rng)).collect()
}

fn aggregate(sc: &Scenario, shadowed: &ShadowedPattern, fading: &[f64]) -> f64 {
    let rho2 = sc.exclusion_radius * sc.exclusion_radius;
    let half = -0.5 * sc.alpha;
    let terms: Vec<f64> = shadowed
        .iter()
        .zip(fading)
        .map(|((p, t), h)| {
            let r2 = p.x * p.x + p.y * p.y;
            if r2 < rho2 || r2 == 0.0 {
                0.0
            } else {
                h * t * r2.powf(half)
            }
        })
        .collect();
    pairwise_sum(&terms)
}

/// Interference at the origin for one replication.
pub fn sample_interference(sc: &Scenario, master_seed: u64, replication: u64) -> Result<InterferenceSample> {
    let seed = Seed::new(master_seed, replication);
    let shadowed = sample_shadowed(sc, seed)?;
    let fading = draw_fading(shadowed.len(), seed);
    let value = aggregate(sc, &shadowed, &fading);
    Ok(InterferenceSample {
        value,
        shadowed,
        fading,
    })
}

/// Interference values for replications `0..n_reps`.
pub fn interference_values(sc: &Scenario, n_reps: usize, master_seed: u64) -> Result<Vec<f64>> {
    sc.validate()?;
    replicate(n_reps, |rep| Ok(sample_interference(sc, master_seed, rep)?.value))
}

/// Empirical `E[exp(-s I)]` with per-point standard errors. The same
/// replications serve every `s`.
pub fn empirical_laplace(sc: &Scenario, s_grid: &[f64], n_reps: usize, master_seed: u64) -> Result<LaplaceCurve> {
    let values = interference_values(sc, n_reps, master_seed)?;
    Ok(laplace_from_samples(&values, s_grid))
}

pub fn laplace_from_samples(samples: &[f64], s_grid: &[f64]) -> LaplaceCurve {
    let mut out = Vec::with_capacity(s_grid.len());
    let mut stderr = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let e: Vec<f64> = samples.iter().map(|i| (-s * i).exp()).collect();
        let est = MetricEstimate::from_samples(&e);
        out.push(est.value);
        stderr.push(est.stderr);
    }
    LaplaceCurve {
        s_grid: s_grid.to_vec(),
        values: out,
        error: CurveError::Empirical {
            stderr,
            replications: samples.len(),
        },
    }
}

/// Sample mean and variance of the interference, each with a standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: MetricEstimate,
    pub variance: MetricEstimate,
}

pub fn moments_from_samples(xs: &[f64]) -> MomentEstimate {
    let mean = MetricEstimate::from_samples(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean.value).powi(2)).collect();
    let mut variance = MetricEstimate::from_samples(&sq);
    let n = xs.len() as f64;
    if n > 1.0 {
        variance.value *= n / (n - 1.0);
    }
    MomentEstimate { mean, variance }
}

/// Success probability of one slot given the frozen pattern and
/// attenuations, averaging Rayleigh fading on every link:
/// `exp(-s N) prod_x 1 / (1 + s T_x |x|^-alpha)` with `s = theta d^alpha`.
pub fn conditional_success_prob(shadowed: &ShadowedPattern, theta: f64, sc: &Scenario) -> f64 {
    let s = sc.link_argument(theta);
    let rho2 = sc.exclusion_radius * sc.exclusion_radius;
    let half = -0.5 * sc.alpha;
    let mut log_p = -s * sc.noise;
    for (p, t) in shadowed.iter() {
        let r2 = p.x * p.x + p.y * p.y;
        if r2 < rho2 || r2 == 0.0 {
            continue;
        }
        log_p -= (s * t * r2.powf(half)).ln_1p();
    }
    log_p.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Intensity, Point};
    use crate::shadowing::CellLabel;

    fn grid_scenario(mode: CorrelationMode) -> Scenario {
        Scenario::new(
            Deployment::Ppp { intensity: 1.0 },
            ShadowModel::Grid {
                cell_size: 5.0,
                obstacle_intensity: 1.0,
                attenuation: 0.1,
            },
            mode,
            4.0,
        )
        .unwrap()
    }

    fn frozen(points: Vec<Point>, t: Vec<f64>) -> ShadowedPattern {
        let n = points.len();
        ShadowedPattern {
            pattern: PointPattern {
                points,
                mother_index: None,
                mothers: Vec::new(),
                intensity: Intensity::Poisson { intensity: 1.0 },
                window: Window::new(10.0).unwrap(),
            },
            attenuation: t,
            obstacle_counts: vec![0; n],
            labels: (0..n).map(CellLabel::Point).collect(),
            mode: CorrelationMode::Independent,
        }
    }

    #[test]
    fn empty_and_single_point_interference() {
        let sc = grid_scenario(CorrelationMode::Correlated);
        let empty = frozen(Vec::new(), Vec::new());
        assert_eq!(aggregate(&sc, &empty, &[]), 0.0);
        let one = frozen(vec![Point::new(2.0, 0.0)], vec![1.0]);
        assert_eq!(aggregate(&sc, &one, &[1.0]), 1.0 / 16.0);
    }

    #[test]
    fn success_probability_examples() {
        let sc = grid_scenario(CorrelationMode::Correlated);
        assert_eq!(conditional_success_prob(&frozen(Vec::new(), Vec::new()), 3.0, &sc), 1.0);
        // theta d^alpha = 1 with d = 0.5
        let one = frozen(vec![Point::new(1.0, 0.0)], vec![1.0]);
        let p = conditional_success_prob(&one, 16.0, &sc);
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn replications_are_deterministic_and_paired() {
        let cor = grid_scenario(CorrelationMode::Correlated);
        let ind = grid_scenario(CorrelationMode::Independent);
        let a = sample_interference(&cor, 7, 3).unwrap();
        let b = sample_interference(&cor, 7, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_interference(&ind, 7, 3).unwrap();
        assert_eq!(a.shadowed.pattern, c.shadowed.pattern);
        assert_eq!(a.fading, c.fading);
    }

    #[test]
    fn laplace_at_zero_is_exact() {
        let sc = grid_scenario(CorrelationMode::Independent);
        let curve = empirical_laplace(&sc, &[0.0, 0.1, 1.0], 1000, 1).unwrap();
        assert_eq!(curve.values[0], 1.0);
        assert_eq!(curve.error_at(0), 0.0);
        assert!(curve.values[1] >= curve.values[2]);
    }

    #[test]
    fn cluster_shadow_requires_matern() {
        let r = Scenario::new(
            Deployment::Ppp { intensity: 1.0 },
            ShadowModel::Cluster {
                obstacle_intensity: 1.0,
                attenuation: 0.1,
            },
            CorrelationMode::Correlated,
            4.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn pairwise_sum_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        assert_eq!(pairwise_sum(&xs), pairwise_sum(&xs.clone()));
        assert!((pairwise_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
    }
}
