//! Link-level metrics: coverage under Rayleigh and Rician serving links,
//! mean Shannon throughput and local-delay tails.
//!
//! Coverage at threshold `theta` uses the Laplace argument
//! `s = theta d^alpha` and the noise factor `exp(-s N)`.

use serde::{Deserialize, Serialize};

use crate::analytic::InterferenceTransform;
use crate::error::{ensure, Result};
use crate::rng::Seed;
use crate::shadowing::CorrelationMode;
use crate::simulate::{conditional_success_prob, replicate, sample_shadowed, MetricEstimate, Scenario};
use crate::special::{exp_e1_scaled, ln_factorial, marcum_q1, poisson_upper_tail};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkFading {
    Rayleigh,
    Rician { kappa: f64 },
}

/// Serving link. Its shadowing factor is always one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    pub fading: LinkFading,
    pub distance: f64,
    pub alpha: f64,
}

impl LinkModel {
    pub fn rayleigh(distance: f64, alpha: f64) -> Self {
        Self {
            fading: LinkFading::Rayleigh,
            distance,
            alpha,
        }
    }

    pub fn rician(kappa: f64, distance: f64, alpha: f64) -> Self {
        Self {
            fading: LinkFading::Rician { kappa },
            distance,
            alpha,
        }
    }

    pub fn of(sc: &Scenario) -> Self {
        Self::rayleigh(sc.link_distance, sc.alpha)
    }

    pub fn argument(&self, theta: f64) -> f64 {
        theta * self.distance.powf(self.alpha)
    }

    fn validate(&self, theta: f64) -> Result<()> {
        ensure(theta > 0.0, || format!("threshold must be positive, got {theta}"))?;
        ensure(self.distance > 0.0, || "link distance must be positive".into())?;
        if let LinkFading::Rician { kappa } = self.fading {
            ensure(kappa >= 0.0, || format!("Rician factor must be non-negative, got {kappa}"))?;
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `exp(-s N) L(s)` with `s = theta d^alpha`, for any Laplace evaluator.
pub fn coverage_rayleigh_with<F>(laplace: F, theta: f64, link: &LinkModel, noise: f64) -> Result<f64>
where
    F: FnOnce(f64) -> Result<f64>,
{
    link.validate(theta)?;
    let s = link.argument(theta);
    Ok((-s * noise).exp() * laplace(s)?)
}

/// Analytic Rayleigh coverage.
pub fn coverage_rayleigh(
    transform: &dyn InterferenceTransform,
    mode: CorrelationMode,
    theta: f64,
    link: &LinkModel,
    noise: f64,
) -> Result<f64> {
    coverage_rayleigh_with(|s| transform.laplace(s, mode), theta, link, noise)
}

/// Rayleigh coverage estimated from interference samples.
pub fn coverage_rayleigh_samples(samples: &[f64], theta: f64, link: &LinkModel, noise: f64) -> Result<MetricEstimate> {
    link.validate(theta)?;
    let s = link.argument(theta);
    let v: Vec<f64> = samples.iter().map(|i| (-s * (noise + i)).exp()).collect();
    Ok(MetricEstimate::from_samples(&v))
}

fn kappa_of(link: &LinkModel) -> f64 {
    match link.fading {
        LinkFading::Rayleigh => 0.0,
        LinkFading::Rician { kappa } => kappa,
    }
}

/// Rician coverage through the Marcum Q function:
/// `E[Q_1(sqrt(2 kappa), sqrt(2 (1 + kappa) s (N + I)))]`, with the
/// Rician power normalised to unit mean.
pub fn coverage_rician(samples: &[f64], theta: f64, link: &LinkModel, noise: f64) -> Result<MetricEstimate> {
    link.validate(theta)?;
    let kappa = kappa_of(link);
    let s = link.argument(theta);
    let a = (2.0 * kappa).sqrt();
    let v: Vec<f64> = samples
        .iter()
        .map(|i| {
            let y = (1.0 + kappa) * s * (noise + i);
            if kappa == 0.0 {
                (-y).exp()
            } else {
                marcum_q1(a, (2.0 * y).sqrt())
            }
        })
        .collect();
    Ok(MetricEstimate::from_samples(&v))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoverage {
    pub estimate: MetricEstimate,
    /// Bound on the mass of the outer sum beyond `n_max`.
    pub remainder: f64,
    pub converged: bool,
}

/// Rician coverage from the double series
/// `e^-kappa sum_n kappa^n / n! sum_{l<=n} (-1)^l s^l / l! L^(l)(s)`
/// with `L^(l)(s) = E[(-X)^l e^{-s X}]`, `X = N + I`, evaluated at
/// `s = (1 + kappa) theta d^alpha`.
pub fn coverage_rician_series(
    samples: &[f64],
    theta: f64,
    link: &LinkModel,
    noise: f64,
    n_max: usize,
) -> Result<SeriesCoverage> {
    link.validate(theta)?;
    let kappa = kappa_of(link);
    let s = (1.0 + kappa) * link.argument(theta);
    let weights: Vec<f64> = (0..=n_max)
        .map(|n| {
            if kappa == 0.0 {
                if n == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (n as f64 * kappa.ln() - kappa - ln_factorial(n as u32)).exp()
            }
        })
        .collect();
    let v: Vec<f64> = samples
        .iter()
        .map(|i| {
            let y = s * (noise + i);
            // (s^l / l!) (-1)^l L^(l)(s) per sample, i.e. y^l e^-y / l!
            let mut total = 0.0;
            let mut cdf = 0.0;
            let mut term = if y < 500.0 { (-y).exp() } else { 0.0 };
            for (n, w) in weights.iter().enumerate() {
                if n > 0 {
                    term = if y < 500.0 {
                        term * y / n as f64
                    } else {
                        (n as f64 * y.ln() - y - ln_factorial(n as u32)).exp()
                    };
                }
                cdf += term;
                total += w * cdf;
            }
            total
        })
        .collect();
    let remainder = if kappa == 0.0 {
        0.0
    } else {
        poisson_upper_tail(n_max as u32, kappa)
    };
    Ok(SeriesCoverage {
        estimate: MetricEstimate::from_samples(&v),
        remainder,
        converged: remainder < 1e-6,
    })
}

/// Mean Shannon throughput in bits/s/Hz over a Rayleigh serving link,
/// integrating the serving fading exactly per sample:
/// `E[log2(1 + h A)] = e^{1/A} E1(1/A) / ln 2`, `A = d^-alpha / (N + I)`.
pub fn shannon_throughput(samples: &[f64], link: &LinkModel, noise: f64) -> MetricEstimate {
    let gain = link.distance.powf(-link.alpha);
    let v: Vec<f64> = samples
        .iter()
        .map(|i| {
            let z = (noise + i) / gain;
            if z > 0.0 {
                exp_e1_scaled(z) / std::f64::consts::LN_2
            } else {
                f64::INFINITY
            }
        })
        .collect();
    MetricEstimate::from_samples(&v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayTail {
    /// Slot counts `1..=n_max`.
    pub n_grid: Vec<usize>,
    /// `P[L > n]`.
    pub tail: Vec<f64>,
    pub tail_stderr: Vec<f64>,
    /// `P[L > n_max]`.
    pub censored_mass: f64,
    /// Sample mean of `1 / p`, the conditional mean local delay.
    pub mean_inverse: MetricEstimate,
    /// Hill estimate of the tail index of `1 / p`.
    pub tail_index: f64,
    /// Set when the tail index is below two, so the sample mean of `1 / p`
    /// is unreliable (or the true mean infinite).
    pub heavy_tail: bool,
}

/// Per-pattern success probabilities for patterns `0..n_patterns`.
pub fn success_probabilities(sc: &Scenario, theta: f64, n_patterns: usize, master_seed: u64) -> Result<Vec<f64>> {
    sc.validate()?;
    ensure(theta > 0.0, || format!("threshold must be positive, got {theta}"))?;
    replicate(n_patterns, |rep| {
        let shadowed = sample_shadowed(sc, Seed::new(master_seed, rep))?;
        Ok(conditional_success_prob(&shadowed, theta, sc))
    })
}

/// Local-delay tail from frozen-pattern success probabilities:
/// `P[L > n] = E[(1 - p)^n]`.
pub fn delay_tail_from_probabilities(probs: &[f64], n_max: usize) -> DelayTail {
    let n_grid: Vec<usize> = (1..=n_max).collect();
    let mut tail = Vec::with_capacity(n_max);
    let mut tail_stderr = Vec::with_capacity(n_max);
    let mut powers: Vec<f64> = vec![1.0; probs.len()];
    for _ in &n_grid {
        for (q, p) in powers.iter_mut().zip(probs) {
            *q *= 1.0 - p;
        }
        let est = MetricEstimate::from_samples(&powers);
        tail.push(est.value);
        tail_stderr.push(est.stderr);
    }
    let inverse: Vec<f64> = probs.iter().map(|p| 1.0 / p).collect();
    let tail_index = hill_index(&inverse);
    DelayTail {
        censored_mass: tail.last().copied().unwrap_or(0.0),
        n_grid,
        tail,
        tail_stderr,
        mean_inverse: MetricEstimate::from_samples(&inverse),
        tail_index,
        heavy_tail: tail_index < 2.0,
    }
}

/// Local-delay tail over `n_patterns` frozen realizations.
pub fn local_delay_tail(sc: &Scenario, theta: f64, n_max: usize, n_patterns: usize, master_seed: u64) -> Result<DelayTail> {
    ensure(n_max >= 1, || "n_max must be at least one".into())?;
    let probs = success_probabilities(sc, theta, n_patterns, master_seed)?;
    Ok(delay_tail_from_probabilities(&probs, n_max))
}

/// Hill estimator over the top `sqrt(n)` order statistics.
fn hill_index(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite() && *x > 0.0).collect();
    if v.len() < 16 || xs.iter().any(|x| !x.is_finite()) {
        return if xs.iter().any(|x| !x.is_finite()) { 0.0 } else { f64::INFINITY };
    }
    v.sort_by(|a, b| b.total_cmp(a));
    let k = (v.len() as f64).sqrt() as usize;
    let threshold = v[k].ln();
    let mean_excess: f64 = v[..k].iter().map(|x| x.ln() - threshold).sum::<f64>() / k as f64;
    if mean_excess <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / mean_excess
    }
}

/// Mean and standard error of the paired difference `a - b`.
pub fn paired_difference(a: &[f64], b: &[f64]) -> MetricEstimate {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    MetricEstimate::from_samples(&d)
}
