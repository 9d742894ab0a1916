//! Mean of the inverse conditional transform, `E[1 / L_{I|Phi}(s)]`, for
//! i.i.d. marks. This is the quantity behind the mean local delay.

use serde::{Deserialize, Serialize};

use super::PoissonLogAttenuation;
use crate::error::{ensure, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::shadowing::CorrelationMode;

/// Law of the per-slot mark (re-drawn every slot).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotMark {
    /// Unit-mean exponential (Rayleigh power fading).
    Exponential,
    /// Constant one.
    Deterministic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ReuseInverse {
    Finite(f64),
    /// The spatial integral is infinite.
    Divergent,
}

impl ReuseInverse {
    pub fn value(&self) -> f64 {
        match self {
            ReuseInverse::Finite(v) => *v,
            ReuseInverse::Divergent => f64::INFINITY,
        }
    }
}

/// `E[1 / L_{I|Phi}(s)] = exp(2 pi lambda int_rho^inf v (E_T[1 / L_h(s T v^-alpha)] - 1) dv)`
/// for a PPP of intensity `lambda` with per-slot marks `h` and an optional
/// frozen per-point multiplier `T`.
pub fn spatial_reuse_inverse(
    s: f64,
    intensity: f64,
    alpha: f64,
    mark: SlotMark,
    frozen: Option<PoissonLogAttenuation>,
    exclusion_radius: f64,
    mode: CorrelationMode,
) -> Result<ReuseInverse> {
    if mode == CorrelationMode::Correlated {
        return Err(Error::Unsupported(
            "the inverse transform formula needs independent marks".into(),
        ));
    }
    if s < 0.0 || s.is_nan() {
        return Err(Error::Domain(format!("argument must be non-negative, got {s}")));
    }
    ensure(intensity > 0.0, || format!("intensity must be positive, got {intensity}"))?;
    ensure(exclusion_radius >= 0.0, || "exclusion radius must be non-negative".into())?;
    if s == 0.0 {
        return Ok(ReuseInverse::Finite(1.0));
    }
    // the integrand is ~ s E[T] v^{1-alpha} at both ends
    if alpha <= 2.0 || exclusion_radius == 0.0 {
        return Ok(ReuseInverse::Divergent);
    }
    let law = frozen.unwrap_or(PoissonLogAttenuation {
        attenuation: 1.0,
        mean: 0.0,
    });
    let rho = exclusion_radius;
    let integral = match mark {
        SlotMark::Exponential => law.expectation() * s * rho.powf(2.0 - alpha) / (alpha - 2.0),
        SlotMark::Deterministic => {
            let atoms = law.atoms(1e-12);
            let excess = |v: f64| -> f64 {
                let w = s * v.powf(-alpha);
                v * atoms.iter().map(|&(t, p)| p * (w * t).exp_m1()).sum::<f64>()
            };
            integrate(
                |x: f64| {
                    let v = rho / (1.0 - x);
                    excess(v) * rho / ((1.0 - x) * (1.0 - x))
                },
                0.0,
                1.0,
                QuadOptions::tolerances(1e-13, 1e-11),
            )
            .value
        }
    };
    Ok(ReuseInverse::Finite((2.0 * std::f64::consts::PI * intensity * integral).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        let v = spatial_reuse_inverse(0.0, 1.0, 4.0, SlotMark::Exponential, None, 0.0, CorrelationMode::Independent)
            .unwrap();
        assert_eq!(v, ReuseInverse::Finite(1.0));
    }

    #[test]
    fn closed_form_for_exponential_marks() {
        let v = spatial_reuse_inverse(0.3, 1.0, 4.0, SlotMark::Exponential, None, 0.5, CorrelationMode::Independent)
            .unwrap()
            .value();
        let want = (std::f64::consts::PI * 0.3 / 0.25).exp();
        assert!((v - want).abs() < 1e-12 * want);
    }

    #[test]
    fn divergence_and_unsupported() {
        let v = spatial_reuse_inverse(0.3, 1.0, 4.0, SlotMark::Exponential, None, 0.0, CorrelationMode::Independent)
            .unwrap();
        assert_eq!(v, ReuseInverse::Divergent);
        assert!(matches!(
            spatial_reuse_inverse(0.3, 1.0, 4.0, SlotMark::Exponential, None, 0.5, CorrelationMode::Correlated),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn jensen_direction_for_deterministic_marks() {
        // E[1/L_{I|Phi}] >= 1/E[L_{I|Phi}] = 1/L_I
        let (s, rho) = (0.2, 0.5);
        let inv = spatial_reuse_inverse(s, 1.0, 4.0, SlotMark::Deterministic, None, rho, CorrelationMode::Independent)
            .unwrap()
            .value();
        let lap = integrate(
            |x: f64| {
                let v = rho / (1.0 - x);
                v * -(-s * v.powi(-4)).exp_m1() * rho / ((1.0 - x) * (1.0 - x))
            },
            0.0,
            1.0,
            QuadOptions::tolerances(1e-13, 1e-11),
        )
        .value;
        let l_i = (-2.0 * std::f64::consts::PI * lap).exp();
        assert!(inv >= 1.0 / l_i);
    }
}
