//! Conditional Laplace transform and moments of the interference of a PPP
//! shadowed by a square grid of cells.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{InterferenceTransform, MomentPair, PoissonLogAttenuation, DEFAULT_QUAD_TOL, DEFAULT_TAIL_MASS};
use crate::error::{ensure, Error, Result};
use crate::quadrature::{integrate, integrate_2d, QuadOptions};
use crate::shadowing::CorrelationMode;

/// Below this value of `u * max|x|^-alpha` the cell integral of
/// `u / (|x|^alpha + u)` is replaced by its two-term expansion.
pub(super) const LINEAR_REGIME: f64 = 1e-3;

const MAX_HALF_WIDTH: i64 = 3000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Base-station intensity.
    pub intensity: f64,
    pub alpha: f64,
    pub cell_size: f64,
    pub obstacle_intensity: f64,
    pub attenuation: f64,
    /// Interferers closer than this are removed.
    pub exclusion_radius: f64,
    pub quad_tol: f64,
    /// Minimum radius of explicitly enumerated cells; widened until the
    /// remainder bound drops below `quad_tol / 10`.
    pub cell_cutoff: f64,
    pub tail_mass: f64,
}

impl GridParams {
    pub fn new(intensity: f64, alpha: f64, cell_size: f64, obstacle_intensity: f64, attenuation: f64) -> Self {
        Self {
            intensity,
            alpha,
            cell_size,
            obstacle_intensity,
            attenuation,
            exclusion_radius: 0.0,
            quad_tol: DEFAULT_QUAD_TOL,
            cell_cutoff: 0.0,
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
        ensure(self.intensity > 0.0 && self.intensity.is_finite(), || {
            format!("intensity must be positive, got {}", self.intensity)
        })?;
        ensure(self.cell_size > 0.0 && self.cell_size.is_finite(), || {
            format!("cell size must be positive, got {}", self.cell_size)
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

    fn shadowed(&self) -> bool {
        self.obstacle_intensity > 0.0 && self.attenuation < 1.0
    }
}

#[derive(Clone, Debug)]
struct Cell {
    /// Number of cells sharing this one's integrals under the square's
    /// symmetry group.
    mult: f64,
    x: (f64, f64),
    y: (f64, f64),
    /// Largest `|x|^-alpha` over the admissible part of the cell.
    w_max: f64,
    j1: f64,
    j2: f64,
    law: PoissonLogAttenuation,
    atoms: Vec<(f64, f64)>,
}

/// Grid transform with per-cell integrals cached for repeated evaluation.
#[derive(Clone, Debug)]
pub struct GridTransform {
    params: GridParams,
    cells: Vec<Cell>,
    half_width: i64,
    /// `int |x|^-alpha` and `int |x|^-2alpha` outside the enumerated square.
    outer_j1: f64,
    outer_j2: f64,
}

impl GridTransform {
    pub fn new(params: GridParams) -> Result<Self> {
        params.validate()?;
        let half_width = choose_half_width(&params);
        let reps: Vec<(i64, i64)> = (0..=half_width).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
        let cells = reps
            .par_iter()
            .with_min_len(16)
            .filter_map(|&(i, j)| build_cell(&params, i, j))
            .collect::<Result<Vec<_>>>()?;
        let a = (half_width as f64 + 0.5) * params.cell_size;
        let outer_j1 = square_complement_integral(a, params.alpha);
        let outer_j2 = square_complement_integral(a, 2.0 * params.alpha);
        Ok(Self {
            params,
            cells,
            half_width,
            outer_j1,
            outer_j2,
        })
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    /// Half-width, in cells, of the enumerated square.
    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    fn check_s(s: f64) -> Result<()> {
        if s < 0.0 || s.is_nan() {
            return Err(Error::Domain(format!("Laplace argument must be non-negative, got {s}")));
        }
        Ok(())
    }

    fn cell_h(&self, cell: &Cell, u: f64, abs_tol: f64) -> f64 {
        if u * cell.w_max <= LINEAR_REGIME {
            return u * cell.j1 - u * u * cell.j2;
        }
        let alpha = self.params.alpha;
        let rho2 = self.params.exclusion_radius.powi(2);
        cell_integral(
            cell,
            self.params.exclusion_radius,
            |r2| {
                if r2 < rho2 {
                    0.0
                } else {
                    u / (r2.powf(0.5 * alpha) + u)
                }
            },
            abs_tol,
        )
        .value
    }

    /// `ln L(s)` under the given mode.
    pub fn log_laplace(&self, s: f64, mode: CorrelationMode) -> Result<f64> {
        Self::check_s(s)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        let lambda = self.params.intensity;
        let cell_tol = 0.01 * self.params.quad_tol / (lambda * self.cells.len() as f64).max(1.0);
        let per_cell: Vec<f64> = self
            .cells
            .par_iter()
            .with_min_len(8)
            .map(|cell| {
                let log_factor = match mode {
                    CorrelationMode::Independent => {
                        -lambda
                            * cell
                                .atoms
                                .iter()
                                .map(|&(t, p)| p * self.cell_h(cell, s * t, cell_tol))
                                .sum::<f64>()
                    }
                    CorrelationMode::Correlated => cell
                        .atoms
                        .iter()
                        .map(|&(t, p)| p * (-lambda * self.cell_h(cell, s * t, cell_tol)).exp())
                        .sum::<f64>()
                        .ln(),
                };
                cell.mult * log_factor
            })
            .collect();
        let mut total: f64 = per_cell.iter().sum();
        if !self.params.shadowed() {
            total -= lambda * (s * self.outer_j1 - s * s * self.outer_j2);
        }
        Ok(total)
    }

    /// Mean and variance of the conditional interference.
    pub fn moments(&self, mode: CorrelationMode) -> Result<MomentPair> {
        self.require_integrable()?;
        let lambda = self.params.intensity;
        let mut mean = 0.0;
        let mut var_ind = 0.0;
        let mut var_cor = 0.0;
        for c in &self.cells {
            mean += c.mult * lambda * c.law.expectation() * c.j1;
            var_ind += c.mult * 2.0 * lambda * c.law.second_moment() * c.j2;
            // full mixture over the cell's shared draw
            let (mut m1, mut m2) = (0.0, 0.0);
            for &(t, p) in &c.atoms {
                let cond_mean = lambda * t * c.j1;
                m1 += p * cond_mean;
                m2 += p * (2.0 * lambda * t * t * c.j2 + cond_mean * cond_mean);
            }
            var_cor += c.mult * (m2 - m1 * m1);
        }
        if !self.params.shadowed() {
            mean += lambda * self.outer_j1;
            var_ind += 2.0 * lambda * self.outer_j2;
            var_cor += 2.0 * lambda * self.outer_j2;
        }
        let variance = match mode {
            CorrelationMode::Independent => var_ind,
            CorrelationMode::Correlated => var_cor,
        };
        Ok(MomentPair { mean, variance })
    }

    /// `lambda^2 sum_cells var[T] (int |x|^-alpha)^2`, from the closed-form
    /// moments of `T`.
    pub fn variance_gap(&self) -> Result<f64> {
        self.require_integrable()?;
        let l2 = self.params.intensity.powi(2);
        Ok(self.cells.iter().map(|c| c.mult * l2 * c.law.variance() * c.j1 * c.j1).sum())
    }

    fn require_integrable(&self) -> Result<()> {
        if self.cells.iter().any(|c| !c.j1.is_finite() && c.mult > 0.0) {
            return Err(Error::Divergence(
                "interference moments are infinite without an exclusion radius around the user".into(),
            ));
        }
        Ok(())
    }
}

impl InterferenceTransform for GridTransform {
    fn laplace(&self, s: f64, mode: CorrelationMode) -> Result<f64> {
        Ok(self.log_laplace(s, mode)?.exp())
    }

    fn tolerance(&self) -> f64 {
        self.params.quad_tol
    }
}

fn choose_half_width(p: &GridParams) -> i64 {
    let min_cells = (p.cell_cutoff / p.cell_size).ceil() as i64;
    let mut m = min_cells.max(40);
    let target = 0.1 * p.quad_tol;
    // evaluated at s = 100, the bound is linear in s
    let bound = |m: i64| -> f64 {
        let a = (m as f64 + 0.5) * p.cell_size;
        let lambda = p.intensity;
        if p.shadowed() {
            let b = p.obstacle_intensity * (1.0 - p.attenuation);
            200.0 * PI * lambda * (b * p.cell_size / 2f64.sqrt() - b * a).exp() * a.powf(1.0 - p.alpha) / b
        } else {
            2e6 * PI * lambda * a.powf(2.0 - 3.0 * p.alpha) / (3.0 * p.alpha - 2.0)
        }
    };
    while bound(m) > target && m < MAX_HALF_WIDTH {
        m = (m + m / 2).min(MAX_HALF_WIDTH);
    }
    m
}

fn build_cell(p: &GridParams, i: i64, j: i64) -> Option<Result<Cell>> {
    let d = p.cell_size;
    let x = ((i as f64 - 0.5) * d, (i as f64 + 0.5) * d);
    let y = ((j as f64 - 0.5) * d, (j as f64 + 0.5) * d);
    let far2 = x.0.abs().max(x.1.abs()).powi(2) + y.0.abs().max(y.1.abs()).powi(2);
    let rho = p.exclusion_radius;
    if far2 <= rho * rho {
        return None;
    }
    let mult = match (i, j) {
        (0, 0) => 1.0,
        (_, 0) => 4.0,
        (a, b) if a == b => 4.0,
        _ => 8.0,
    };
    let near = clamp_dist(x).hypot(clamp_dist(y)).max(rho);
    let w_max = if near > 0.0 { near.powf(-p.alpha) } else { f64::INFINITY };
    let mean = p.obstacle_intensity * d * ((i * i + j * j) as f64).sqrt();
    let law = match PoissonLogAttenuation::new(p.attenuation, mean) {
        Ok(l) => l,
        Err(e) => return Some(Err(e)),
    };
    let atoms = law.atoms(p.tail_mass);
    let mut cell = Cell {
        mult,
        x,
        y,
        w_max,
        j1: f64::INFINITY,
        j2: f64::INFINITY,
        law,
        atoms,
    };
    if w_max.is_finite() {
        let rho2 = rho * rho;
        let alpha = p.alpha;
        let tol = 1e-3 * p.quad_tol * w_max;
        cell.j1 = cell_integral(&cell, rho, |r2| if r2 < rho2 { 0.0 } else { r2.powf(-0.5 * alpha) }, tol).value;
        cell.j2 = cell_integral(&cell, rho, |r2| if r2 < rho2 { 0.0 } else { r2.powf(-alpha) }, tol * w_max).value;
    }
    Some(Ok(cell))
}

fn clamp_dist(range: (f64, f64)) -> f64 {
    if range.0 <= 0.0 && range.1 >= 0.0 {
        0.0
    } else {
        range.0.abs().min(range.1.abs())
    }
}

/// Integral over the cell of a radial integrand given as a function of
/// `|x|^2`, with breakpoints where the exclusion circle cuts the cell.
fn cell_integral<G: Fn(f64) -> f64>(cell: &Cell, rho: f64, g: G, abs_tol: f64) -> crate::quadrature::QuadResult {
    let (x0, x1) = cell.x;
    let (y0, y1) = cell.y;
    let mut outer = vec![x0];
    for b in [-rho, 0.0, rho] {
        if b > x0 && b < x1 {
            outer.push(b);
        }
    }
    outer.push(x1);
    outer.dedup();
    let inner = |x: f64| -> Vec<f64> {
        let mut v = vec![y0];
        let c = (rho * rho - x * x).max(0.0).sqrt();
        for b in [-c, 0.0, c] {
            if b > y0 && b < y1 {
                v.push(b);
            }
        }
        v.push(y1);
        v.dedup();
        v
    };
    integrate_2d(
        |x, y| g(x * x + y * y),
        &outer,
        inner,
        QuadOptions {
            abs_tol,
            rel_tol: 1e-10,
            max_intervals: 400,
        },
    )
}

/// `int_{x outside [-a, a]^2} |x|^-beta dx` for `beta > 2`.
fn square_complement_integral(a: f64, beta: f64) -> f64 {
    let angular = integrate(
        |t: f64| t.cos().powf(beta - 2.0),
        0.0,
        FRAC_PI_4,
        QuadOptions::tolerances(1e-15, 1e-14),
    )
    .value;
    8.0 * a.powf(2.0 - beta) / (beta - 2.0) * angular
}

/// One-shot evaluation of the grid transform. Build a [`GridTransform`]
/// for repeated arguments.
pub fn laplace_ppp_grid(s: f64, params: &GridParams, mode: CorrelationMode) -> Result<f64> {
    GridTransform::check_s(s)?;
    GridTransform::new(*params)?.laplace(s, mode)
}

pub fn moments_ppp_grid(params: &GridParams, mode: CorrelationMode) -> Result<MomentPair> {
    GridTransform::new(*params)?.moments(mode)
}
