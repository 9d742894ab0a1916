//! Conditional Laplace transform and moments for a Matern cluster process
//! whose clusters share one shadowing draw.
//!
//! Radial integrals run over the mother distance `y`; the daughter disk
//! average is taken in polar coordinates about the user, where a circle of
//! radius `r` meets the disk in an arc of angle `A_y(r)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::LINEAR_REGIME;
use super::{InterferenceTransform, MomentPair, PoissonLogAttenuation, DEFAULT_QUAD_TOL, DEFAULT_TAIL_MASS};
use crate::error::{ensure, Error, Result};
use crate::quadrature::{integrate, integrate_pieces, QuadOptions};
use crate::shadowing::CorrelationMode;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterParams {
    pub mother_intensity: f64,
    pub daughters_mean: f64,
    pub cluster_radius: f64,
    pub alpha: f64,
    pub obstacle_intensity: f64,
    pub attenuation: f64,
    pub exclusion_radius: f64,
    pub quad_tol: f64,
    pub tail_mass: f64,
}

impl ClusterParams {
    pub fn new(
        mother_intensity: f64,
        daughters_mean: f64,
        cluster_radius: f64,
        alpha: f64,
        obstacle_intensity: f64,
        attenuation: f64,
    ) -> Self {
        Self {
            mother_intensity,
            daughters_mean,
            cluster_radius,
            alpha,
            obstacle_intensity,
            attenuation,
            exclusion_radius: 0.0,
            quad_tol: DEFAULT_QUAD_TOL,
            tail_mass: DEFAULT_TAIL_MASS,
        }
    }

    pub fn with_exclusion(mut self, radius: f64) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn with_tolerance(mut self, quad_tol: f64) -> Self {
        self.quad_tol = quad_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) {
            return Err(Error::Divergence(format!(
                "interference is infinite for path-loss exponent {} <= 2",
                self.alpha
            )));
        }
        ensure(self.mother_intensity > 0.0 && self.mother_intensity.is_finite(), || {
            format!("mother intensity must be positive, got {}", self.mother_intensity)
        })?;
        ensure(self.daughters_mean > 0.0 && self.daughters_mean.is_finite(), || {
            format!("mean daughter count must be positive, got {}", self.daughters_mean)
        })?;
        ensure(self.cluster_radius > 0.0 && self.cluster_radius.is_finite(), || {
            format!("cluster radius must be positive, got {}", self.cluster_radius)
        })?;
        ensure(self.obstacle_intensity >= 0.0 && self.obstacle_intensity.is_finite(), || {
            format!("obstacle intensity must be non-negative, got {}", self.obstacle_intensity)
        })?;
        ensure(self.attenuation > 0.0 && self.attenuation <= 1.0, || {
            format!("attenuation must lie in (0, 1], got {}", self.attenuation)
        })?;
        ensure(self.exclusion_radius >= 0.0 && self.exclusion_radius.is_finite(), || {
            format!("exclusion radius must be non-negative, got {}", self.exclusion_radius)
        })?;
        ensure(self.quad_tol > 0.0, || "quadrature tolerance must be positive".into())?;
        ensure(self.tail_mass > 0.0 && self.tail_mass < 1.0, || "tail mass must lie in (0, 1)".into())
    }
}

/// Cluster transform; stateless apart from validated parameters.
#[derive(Clone, Debug)]
pub struct ClusterTransform {
    params: ClusterParams,
}

/// Per-mother-distance quantities.
struct Ring {
    law: PoissonLogAttenuation,
    w_max: f64,
    m1: f64,
    m2: f64,
}

impl ClusterTransform {
    pub fn new(params: ClusterParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &ClusterParams {
        &self.params
    }

    /// Arc angle of the circle `|x| = r` inside the daughter disk of a
    /// mother at distance `y`.
    fn arc(&self, r: f64, y: f64) -> f64 {
        let rd = self.params.cluster_radius;
        if r + y <= rd {
            return 2.0 * PI;
        }
        if r >= y + rd || r <= y - rd {
            return 0.0;
        }
        let c = ((r * r + y * y - rd * rd) / (2.0 * r * y)).clamp(-1.0, 1.0);
        2.0 * c.acos()
    }

    fn radial_breaks(&self, y: f64) -> Vec<f64> {
        let rd = self.params.cluster_radius;
        let lo = self.params.exclusion_radius.max(y - rd).max(0.0);
        let hi = y + rd;
        if hi <= lo {
            return Vec::new();
        }
        let mut v = vec![lo];
        if rd - y > lo {
            v.push(rd - y);
        }
        v.push(hi);
        v
    }

    /// Daughter-disk average of `g(|x|)`.
    fn disk_average<G: Fn(f64) -> f64>(&self, y: f64, g: G, abs_tol: f64) -> f64 {
        let breaks = self.radial_breaks(y);
        if breaks.is_empty() {
            return 0.0;
        }
        let rd = self.params.cluster_radius;
        let area = PI * rd * rd;
        integrate_pieces(
            |r| g(r) * r * self.arc(r, y),
            &breaks,
            QuadOptions {
                abs_tol: abs_tol * area,
                rel_tol: 1e-11,
                max_intervals: 200,
            },
        )
        .value
            / area
    }

    fn ring(&self, y: f64) -> Result<Ring> {
        let p = &self.params;
        let law = PoissonLogAttenuation::new(p.attenuation, p.obstacle_intensity * y)?;
        let near = p.exclusion_radius.max(y - p.cluster_radius);
        let (w_max, m1, m2) = if self.radial_breaks(y).is_empty() {
            (0.0, 0.0, 0.0)
        } else if near > 0.0 {
            let w = near.powf(-p.alpha);
            let m1 = self.disk_average(y, |r| r.powf(-p.alpha), 1e-14 * w);
            let m2 = self.disk_average(y, |r| r.powf(-2.0 * p.alpha), 1e-14 * w * w);
            (w, m1, m2)
        } else {
            (f64::INFINITY, f64::INFINITY, f64::INFINITY)
        };
        Ok(Ring { law, w_max, m1, m2 })
    }

    /// `1 - E[exp(-lambda_d D)]` under the mode's placement of `E_T`.
    fn cluster_void(&self, y: f64, s: f64, mode: CorrelationMode, abs_tol: f64) -> Result<f64> {
        let p = &self.params;
        let ring = self.ring(y)?;
        if ring.w_max == 0.0 {
            return Ok(0.0);
        }
        let ld = p.daughters_mean;
        if s * ring.w_max <= LINEAR_REGIME && ld * s * ring.m1 <= LINEAR_REGIME {
            let (e1, e2) = (ring.law.expectation(), ring.law.second_moment());
            let x_mean = ld * (s * e1 * ring.m1 - s * s * e2 * ring.m2);
            return Ok(match mode {
                CorrelationMode::Independent => -(-x_mean).exp_m1(),
                CorrelationMode::Correlated => x_mean - 0.5 * (ld * s * ring.m1).powi(2) * e2,
            });
        }
        let alpha = p.alpha;
        let d = |u: f64| -> f64 {
            if u * ring.w_max <= LINEAR_REGIME {
                u * ring.m1 - u * u * ring.m2
            } else {
                self.disk_average(y, |r| u / (r.powf(alpha) + u), abs_tol)
            }
        };
        let atoms = ring.law.atoms(p.tail_mass);
        Ok(match mode {
            CorrelationMode::Independent => {
                let x: f64 = atoms.iter().map(|&(t, pr)| pr * d(s * t)).sum();
                -(-ld * x).exp_m1()
            }
            CorrelationMode::Correlated => atoms.iter().map(|&(t, pr)| pr * -(-ld * d(s * t)).exp_m1()).sum(),
        })
    }

    fn outer_breaks(&self) -> Vec<f64> {
        let rd = self.params.cluster_radius;
        let rho = self.params.exclusion_radius;
        let mut v = vec![0.0, rd, rho + rd, (rho - rd).max(0.0), 2.0 * rd];
        let stop = 8.0 * rd.max(rho).max(1.0);
        let mut x = 2.0 * rd;
        while x < stop {
            x *= 2.0;
            v.push(x.min(stop));
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// `int_0^inf h(y) dy`: finite pieces, then `y = Y / (1 - v)` above
    /// the last break.
    fn radial_integral<H: Fn(f64) -> f64>(&self, h: H, abs_tol: f64) -> f64 {
        let breaks = self.outer_breaks();
        let top = *breaks.last().expect("non-empty breaks");
        let opts = QuadOptions {
            abs_tol: 0.5 * abs_tol,
            rel_tol: 1e-9,
            max_intervals: 400,
        };
        let head = integrate_pieces(&h, &breaks, opts).value;
        let tail = integrate(
            |v: f64| {
                let y = top / (1.0 - v);
                if !(y < 1e150) {
                    return 0.0;
                }
                h(y) * top / ((1.0 - v) * (1.0 - v))
            },
            0.0,
            1.0,
            opts,
        )
        .value;
        head + tail
    }

    pub fn log_laplace(&self, s: f64, mode: CorrelationMode) -> Result<f64> {
        if s < 0.0 || s.is_nan() {
            return Err(Error::Domain(format!("Laplace argument must be non-negative, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let lm = self.params.mother_intensity;
        let tol = self.params.quad_tol / (2.0 * PI * lm);
        let failure = std::cell::Cell::new(None);
        let integral = self.radial_integral(
            |y| match self.cluster_void(y, s, mode, 1e-3 * tol) {
                Ok(g) => y * g,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            },
            tol,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(-2.0 * PI * lm * integral)
    }

    fn moment_integral<H: Fn(&Ring) -> f64>(&self, h: H) -> Result<f64> {
        if self.params.exclusion_radius <= 0.0 {
            return Err(Error::Divergence(
                "interference moments are infinite without an exclusion radius around the user".into(),
            ));
        }
        let failure = std::cell::Cell::new(None);
        let v = self.radial_integral(
            |y| match self.ring(y) {
                Ok(r) => y * h(&r),
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            },
            1e-13,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(2.0 * PI * self.params.mother_intensity * v)
    }

    pub fn moments(&self, mode: CorrelationMode) -> Result<MomentPair> {
        let ld = self.params.daughters_mean;
        let mean = self.moment_integral(|r| ld * r.law.expectation() * r.m1)?;
        let variance = match mode {
            CorrelationMode::Independent => self.moment_integral(|r| {
                2.0 * ld * r.law.second_moment() * r.m2 + (ld * r.law.expectation() * r.m1).powi(2)
            })?,
            CorrelationMode::Correlated => self.moment_integral(|r| {
                r.law.second_moment() * (2.0 * ld * r.m2 + (ld * r.m1).powi(2))
            })?,
        };
        Ok(MomentPair { mean, variance })
    }

    /// `lambda_m lambda_d^2 int var[T_y] (E_f |x+y|^-alpha)^2 dy`.
    pub fn variance_gap(&self) -> Result<f64> {
        let ld = self.params.daughters_mean;
        self.moment_integral(|r| ld * ld * r.law.variance() * r.m1 * r.m1)
    }
}

impl InterferenceTransform for ClusterTransform {
    fn laplace(&self, s: f64, mode: CorrelationMode) -> Result<f64> {
        Ok(self.log_laplace(s, mode)?.exp())
    }

    fn tolerance(&self) -> f64 {
        self.params.quad_tol
    }
}

pub fn laplace_pcp(s: f64, params: &ClusterParams, mode: CorrelationMode) -> Result<f64> {
    ClusterTransform::new(*params)?.laplace(s, mode)
}

pub fn moments_pcp(params: &ClusterParams, mode: CorrelationMode) -> Result<MomentPair> {
    ClusterTransform::new(*params)?.moments(mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_measure_integrates_to_disk_area() {
        let t = ClusterTransform::new(ClusterParams::new(1.0, 1.0, 1.0, 4.0, 0.0, 1.0)).unwrap();
        for &y in &[0.0, 0.3, 1.0, 2.5] {
            let area = t.disk_average(y, |_| 1.0, 1e-12);
            assert!((area - 1.0).abs() < 1e-9, "y={y}: {area}");
        }
    }

    #[test]
    fn far_disk_average_is_pointlike() {
        let t = ClusterTransform::new(ClusterParams::new(1.0, 1.0, 1.0, 4.0, 0.0, 1.0)).unwrap();
        let y = 50.0;
        let m1 = t.disk_average(y, |r| r.powi(-4), 1e-20);
        assert!((m1 / y.powi(-4) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn zero_argument_and_errors() {
        let t = ClusterTransform::new(ClusterParams::new(0.2, 5.0, 1.0, 4.0, 1.0, 0.1)).unwrap();
        for mode in CorrelationMode::BOTH {
            assert_eq!(t.laplace(0.0, mode).unwrap(), 1.0);
        }
        assert!(matches!(t.laplace(-0.1, CorrelationMode::Independent), Err(Error::Domain(_))));
        assert!(matches!(t.moments(CorrelationMode::Independent), Err(Error::Divergence(_))));
        assert!(matches!(
            ClusterTransform::new(ClusterParams::new(0.2, 5.0, 1.0, 1.5, 1.0, 0.1)),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn unshadowed_modes_coincide() {
        let t = ClusterTransform::new(ClusterParams::new(0.2, 5.0, 1.0, 4.0, 1.0, 1.0)).unwrap();
        let c = t.laplace(0.0625, CorrelationMode::Correlated).unwrap();
        let i = t.laplace(0.0625, CorrelationMode::Independent).unwrap();
        assert!((c - i).abs() < 1e-9);
        assert!(c > 0.0 && c < 1.0);
    }

    #[test]
    fn correlated_dominates() {
        let t = ClusterTransform::new(ClusterParams::new(0.2, 5.0, 1.0, 4.0, 1.0, 0.1)).unwrap();
        for &s in &[0.01, 0.0625, 1.0] {
            let c = t.laplace(s, CorrelationMode::Correlated).unwrap();
            let i = t.laplace(s, CorrelationMode::Independent).unwrap();
            assert!(c >= i - 1e-9, "s={s}: {c} < {i}");
        }
    }

    #[test]
    fn unshadowed_mean_matches_ppp_mean() {
        // the daughter field has intensity lambda_m lambda_d everywhere
        let rho = 0.5;
        let t = ClusterTransform::new(ClusterParams::new(0.2, 5.0, 1.0, 4.0, 0.0, 1.0).with_exclusion(rho)).unwrap();
        let m = t.moments(CorrelationMode::Independent).unwrap();
        let want = 2.0 * PI * 1.0 * rho.powi(-2) / 2.0;
        assert!((m.mean - want).abs() < 1e-6 * want, "{} vs {want}", m.mean);
    }
}
