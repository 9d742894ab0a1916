//! Numerical evaluation of the conditional interference transforms and
//! moments, and the ordering / complete-monotonicity checks built on them.
//!
//! Transmit power is fixed to one throughout.

mod cluster;
mod grid;
mod reuse;

pub use cluster::{laplace_pcp, moments_pcp, ClusterParams, ClusterTransform};
pub use grid::{laplace_ppp_grid, moments_ppp_grid, GridParams, GridTransform};
pub use reuse::{spatial_reuse_inverse, ReuseInverse, SlotMark};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shadowing::CorrelationMode;
use crate::special::poisson_support;

/// Default Poisson-mixture truncation mass.
pub const DEFAULT_TAIL_MASS: f64 = 1e-10;
/// Default absolute quadrature tolerance per transform factor.
pub const DEFAULT_QUAD_TOL: f64 = 1e-6;

/// Law of `T = K^r` with `r ~ Poisson(mean)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonLogAttenuation {
    pub attenuation: f64,
    pub mean: f64,
}

impl PoissonLogAttenuation {
    pub fn new(attenuation: f64, mean: f64) -> Result<Self> {
        if !(attenuation > 0.0 && attenuation <= 1.0) {
            return Err(Error::Parameter(format!("attenuation must lie in (0, 1], got {attenuation}")));
        }
        if !(mean >= 0.0 && mean.is_finite()) {
            return Err(Error::Parameter(format!("obstacle mean must be non-negative, got {mean}")));
        }
        Ok(Self { attenuation, mean })
    }

    /// `E[T] = exp(-mu (1 - K))`.
    pub fn expectation(&self) -> f64 {
        (-self.mean * (1.0 - self.attenuation)).exp()
    }

    /// `E[T^2] = exp(-mu (1 - K^2))`.
    pub fn second_moment(&self) -> f64 {
        (-self.mean * (1.0 - self.attenuation * self.attenuation)).exp()
    }

    pub fn variance(&self) -> f64 {
        (self.second_moment() - self.expectation().powi(2)).max(0.0)
    }

    /// `(K^r, P[r])` pairs covering all but `tail` of the mass.
    pub fn atoms(&self, tail: f64) -> Vec<(f64, f64)> {
        if self.attenuation == 1.0 {
            return vec![(1.0, 1.0)];
        }
        poisson_support(self.mean, tail)
            .into_iter()
            .map(|(r, p)| (self.attenuation.powi(r as i32), p))
            .collect()
    }
}

/// `E_T[1 / (1 + a T)]` by truncated Poisson summation.
pub fn mix_expectation(a: f64, law: &PoissonLogAttenuation, tail: f64) -> f64 {
    law.atoms(tail).iter().map(|&(t, p)| p / (1.0 + a * t)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurveError {
    /// Analytic evaluation with a uniform absolute tolerance.
    Analytic { tolerance: f64 },
    /// Monte Carlo estimate with a per-point standard error.
    Empirical { stderr: Vec<f64>, replications: usize },
}

/// Laplace transform values over a grid of arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCurve {
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub error: CurveError,
}

impl LaplaceCurve {
    pub fn analytic(s_grid: Vec<f64>, values: Vec<f64>, tolerance: f64) -> Self {
        Self {
            s_grid,
            values,
            error: CurveError::Analytic { tolerance },
        }
    }

    /// One-sigma (or tolerance) uncertainty at grid index `i`.
    pub fn error_at(&self, i: usize) -> f64 {
        match &self.error {
            CurveError::Analytic { tolerance } => *tolerance,
            CurveError::Empirical { stderr, .. } => stderr[i],
        }
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self.error, CurveError::Empirical { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

/// Common interface of the analytic interference transforms.
pub trait InterferenceTransform {
    fn laplace(&self, s: f64, mode: CorrelationMode) -> Result<f64>;

    /// Absolute error bound of a single `laplace` value.
    fn tolerance(&self) -> f64;

    fn curve(&self, s_grid: &[f64], mode: CorrelationMode) -> Result<LaplaceCurve> {
        let values = s_grid
            .iter()
            .map(|&s| self.laplace(s, mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(LaplaceCurve::analytic(s_grid.to_vec(), values, self.tolerance()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub holds: bool,
    /// `max_s (b(s) - a(s))`; non-positive when `a` dominates everywhere.
    pub worst_violation: f64,
    /// Largest excess of `b - a` over the allowed tolerance.
    pub worst_excess: f64,
}

/// Checks `a(s) >= b(s) - tol(s)` on a common grid. The tolerance is
/// `sigmas` combined standard errors for empirical curves plus the
/// quadrature tolerance for analytic ones.
pub fn check_ordering_with(a: &LaplaceCurve, b: &LaplaceCurve, sigmas: f64) -> Result<OrderingReport> {
    if a.s_grid.len() != b.s_grid.len()
        || a.values.len() != a.s_grid.len()
        || b.values.len() != b.s_grid.len()
        || a.s_grid.iter().zip(&b.s_grid).any(|(x, y)| x != y)
    {
        return Err(Error::Structural("curves are evaluated on different grids".into()));
    }
    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..a.s_grid.len() {
        let gap = b.values[i] - a.values[i];
        let (ea, eb) = (a.error_at(i), b.error_at(i));
        let stat = |c: &LaplaceCurve, e: f64| if c.is_empirical() { e } else { 0.0 };
        let quad = |c: &LaplaceCurve, e: f64| if c.is_empirical() { 0.0 } else { e };
        let tol = sigmas * stat(a, ea).hypot(stat(b, eb)) + quad(a, ea) + quad(b, eb);
        worst_violation = worst_violation.max(gap);
        worst_excess = worst_excess.max(gap - tol);
    }
    if a.s_grid.is_empty() {
        worst_violation = 0.0;
        worst_excess = 0.0;
    }
    Ok(OrderingReport {
        holds: worst_excess <= 0.0,
        worst_violation: worst_violation.max(0.0),
        worst_excess,
    })
}

/// Laplace-order check with a three-sigma tolerance.
pub fn check_ordering(a: &LaplaceCurve, b: &LaplaceCurve) -> Result<OrderingReport> {
    check_ordering_with(a, b, 3.0)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Finite-difference probe of complete monotonicity: for each order
/// `n <= max_order` and grid point `x`, the central difference
/// `(-1)^n delta_h^n f(x)` must be non-negative up to the propagated
/// evaluation error `value_tol * 2^n`. For a completely monotone `f` the
/// differences are non-negative exactly, so no truncation allowance is
/// needed.
pub fn cm_probe_with_tolerance<F: Fn(f64) -> f64>(
    f: F,
    max_order: usize,
    grid: &[f64],
    h: f64,
    value_tol: f64,
) -> bool {
    for &x in grid {
        for n in 0..=max_order {
            let mut diff = 0.0;
            let mut abs_sum = 0.0;
            for k in 0..=n {
                let v = f(x + (k as f64 - 0.5 * n as f64) * h);
                if !v.is_finite() {
                    return false;
                }
                let c = binomial(n, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
                diff += c * v;
                abs_sum += (c * v).abs();
            }
            let tol = value_tol * 2f64.powi(n as i32) + 8.0 * f64::EPSILON * abs_sum;
            if diff < -tol {
                return false;
            }
        }
    }
    true
}

/// [`cm_probe_with_tolerance`] for functions evaluated to machine precision.
pub fn cm_probe<F: Fn(f64) -> f64>(f: F, max_order: usize, grid: &[f64], h: f64) -> bool {
    cm_probe_with_tolerance(f, max_order, grid, h, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_mixtures() {
        let a = 2.5;
        let none = PoissonLogAttenuation::new(0.1, 0.0).unwrap();
        assert_eq!(mix_expectation(a, &none, 1e-10), 1.0 / (1.0 + a));
        let clear = PoissonLogAttenuation::new(1.0, 7.0).unwrap();
        assert_eq!(mix_expectation(a, &clear, 1e-10), 1.0 / (1.0 + a));
    }

    #[test]
    fn mixture_matches_long_sum() {
        let law = PoissonLogAttenuation::new(0.1, 1.0).unwrap();
        // direct summation to r = 50
        let mut p = (-1.0f64).exp();
        let mut full = 0.0;
        for r in 0..=50 {
            if r > 0 {
                p /= r as f64;
            }
            full += p / (1.0 + 0.1f64.powi(r));
        }
        let got = mix_expectation(1.0, &law, 1e-14);
        assert!((got - full).abs() < 1e-12, "{got} vs {full}");
        assert!(got > 0.0 && got < 1.0);
    }

    #[test]
    fn moments_of_log_attenuation() {
        let law = PoissonLogAttenuation::new(0.3, 2.0).unwrap();
        let atoms = law.atoms(1e-15);
        let m1: f64 = atoms.iter().map(|(t, p)| t * p).sum();
        let m2: f64 = atoms.iter().map(|(t, p)| t * t * p).sum();
        assert!((m1 - law.expectation()).abs() < 1e-13);
        assert!((m2 - law.second_moment()).abs() < 1e-13);
        assert!(PoissonLogAttenuation::new(0.0, 1.0).is_err());
    }

    fn curve(values: Vec<f64>) -> LaplaceCurve {
        LaplaceCurve::analytic(vec![0.1, 0.2, 0.3], values, 1e-9)
    }

    #[test]
    fn ordering_identical_and_swapped() {
        let hi = curve(vec![0.9, 0.8, 0.7]);
        let lo = curve(vec![0.85, 0.7, 0.6]);
        let same = check_ordering(&hi, &hi).unwrap();
        assert!(same.holds);
        assert_eq!(same.worst_violation, 0.0);
        assert!(check_ordering(&hi, &lo).unwrap().holds);
        let swapped = check_ordering(&lo, &hi).unwrap();
        assert!(!swapped.holds);
        assert!((swapped.worst_violation - 0.1).abs() < 1e-12);
    }

    #[test]
    fn ordering_rejects_mismatched_grids() {
        let a = curve(vec![0.9, 0.8, 0.7]);
        let b = LaplaceCurve::analytic(vec![0.1, 0.2], vec![0.9, 0.8], 0.0);
        assert!(matches!(check_ordering(&a, &b), Err(Error::Structural(_))));
    }

    #[test]
    fn cm_examples() {
        let grid: Vec<f64> = (1..30).map(|i| 0.1 * i as f64).collect();
        assert!(cm_probe(|x| (-2.0 * x).exp(), 4, &grid, 0.05));
        assert!(cm_probe(|x| (1.0 + 1.0 / (x + 1.0)).ln(), 3, &grid, 0.05));
        assert!(cm_probe(|x| 1.0 / (1.0 + 2.0 * x).powf(1.5), 4, &grid, 0.05));
        let sin_grid: Vec<f64> = (1..29).map(|i| 0.1 * i as f64).collect();
        assert!(!cm_probe(f64::sin, 3, &sin_grid, 0.05));
    }
}
