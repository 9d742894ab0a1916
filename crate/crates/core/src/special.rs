//! Special functions used by the link-level metrics.

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Exponentially scaled exponential integral `e^z E1(z)` for `z > 0`.
///
/// Power series below 1, modified Lentz continued fraction above.
pub fn exp_e1_scaled(z: f64) -> f64 {
    assert!(z > 0.0, "exp_e1_scaled needs z > 0, got {z}");
    if z <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        let e1 = -EULER_GAMMA - z.ln() - sum;
        e1 * z.exp()
    } else {
        // E1(z) e^z = 1/(z+1- 1/(z+3- 4/(z+5- ...)))
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }
}

/// Exponential integral `E1(z)`.
pub fn e1(z: f64) -> f64 {
    exp_e1_scaled(z) * (-z).exp()
}

/// Exponentially scaled modified Bessel functions `e^{-z} I_k(z)` for
/// `k = 0..=n`, by Miller's backward recurrence normalised with
/// `I_0 + 2 sum_k I_k = e^z`.
pub fn bessel_i_scaled_sequence(z: f64, n: usize) -> Vec<f64> {
    assert!(z >= 0.0);
    let mut out = vec![0.0; n + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = n.max(z as usize) + 20 + (12.0 * z.sqrt()) as usize;
    let mut next = 0.0f64; // I_{k+1}
    let mut cur = 1e-280f64; // I_k
    let mut norm = 0.0f64;
    for k in (1..=start).rev() {
        if k <= n {
            out[k] = cur;
        }
        norm += 2.0 * cur;
        let prev = next + (2.0 * k as f64 / z) * cur;
        next = cur;
        cur = prev;
        if cur > 1e250 {
            // rescale everything seen so far
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// First-order Marcum Q function `Q_1(a, b)`.
///
/// Uses the Neumann series in modified Bessel functions:
/// for `b >= a`, `Q = e^{-(a^2+b^2)/2} sum_{k>=0} (a/b)^k I_k(ab)`;
/// for `b < a`, `Q = 1 - e^{-(a^2+b^2)/2} sum_{k>=1} (b/a)^k I_k(ab)`.
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    assert!(a >= 0.0 && b >= 0.0);
    if b == 0.0 {
        return 1.0;
    }
    if a == 0.0 {
        return (-0.5 * b * b).exp();
    }
    let z = a * b;
    let damp = (-0.5 * (a - b) * (a - b)).exp();
    if damp == 0.0 {
        return if b > a { 0.0 } else { 1.0 };
    }
    let (ratio, from) = if b >= a { (a / b, 0) } else { (b / a, 1) };
    let mut n = (z as usize) + 40 + (15.0 * z.sqrt()) as usize;
    loop {
        let seq = bessel_i_scaled_sequence(z, n);
        let mut sum = 0.0;
        let mut pow = ratio.powi(from as i32);
        let mut last = 0.0;
        for v in seq.iter().skip(from) {
            last = pow * v;
            sum += last;
            pow *= ratio;
        }
        if last <= 1e-17 * sum || n > 100_000 {
            let s = damp * sum;
            return if from == 0 { s.clamp(0.0, 1.0) } else { (1.0 - s).clamp(0.0, 1.0) };
        }
        n *= 2;
    }
}

/// `ln(k!)` via Stirling with exact small values.
pub fn ln_factorial(k: u32) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if k < 64 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let n = k as f64 + 1.0;
    // ln Gamma(n), Stirling series
    (n - 0.5) * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * n) - 1.0 / (360.0 * n.powi(3))
        + 1.0 / (1260.0 * n.powi(5))
}

pub fn poisson_ln_pmf(k: u32, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * mean.ln() - mean - ln_factorial(k)
}

/// Poisson pmf values `(k, p_k)` covering at least `1 - tail` of the mass,
/// renormalised to sum to one. Built outward from the mode.
pub fn poisson_support(mean: f64, tail: f64) -> Vec<(u32, f64)> {
    if mean <= 0.0 {
        return vec![(0, 1.0)];
    }
    let mode = mean.floor() as u32;
    let p_mode = poisson_ln_pmf(mode, mean).exp();
    let mut lower = Vec::new();
    let mut upper = vec![(mode, p_mode)];
    let mut mass = p_mode;
    let mut lo_p = p_mode;
    let mut hi_p = p_mode;
    let mut lo = mode;
    let mut hi = mode;
    while 1.0 - mass > tail {
        let can_down = lo > 0;
        let down_next = if can_down { lo_p * lo as f64 / mean } else { 0.0 };
        let up_next = hi_p * mean / (hi + 1) as f64;
        let added = if can_down && down_next >= up_next {
            lo -= 1;
            lo_p = down_next;
            lower.push((lo, lo_p));
            lo_p
        } else {
            hi += 1;
            hi_p = up_next;
            upper.push((hi, hi_p));
            hi_p
        };
        // rounding can leave `1 - mass` just above a tiny `tail`
        if mass + added == mass {
            break;
        }
        mass += added;
    }
    lower.reverse();
    lower.extend(upper);
    for v in lower.iter_mut() {
        v.1 /= mass;
    }
    lower
}

/// `P[Poisson(mean) > n]`.
pub fn poisson_upper_tail(n: u32, mean: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut p = (-mean).exp();
    let mut cdf = p;
    for k in 1..=n {
        p *= mean / k as f64;
        cdf += p;
    }
    (1.0 - cdf).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    #[test]
    fn e1_matches_quadrature() {
        for &z in &[0.01, 0.3, 1.0, 2.5, 10.0, 80.0] {
            // e^z E1(z) = int_0^inf e^{-t} / (z + t) dt
            let q = integrate(|u: f64| {
                let t = u / (1.0 - u);
                (-t).exp() / (z + t) / ((1.0 - u) * (1.0 - u))
            }, 0.0, 1.0, QuadOptions::tolerances(1e-14, 1e-13));
            let v = exp_e1_scaled(z);
            assert!((v - q.value).abs() / q.value < 1e-10, "z={z}: {v} vs {}", q.value);
        }
    }

    #[test]
    fn e1_at_one() {
        assert!((e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
    }

    #[test]
    fn bessel_sequence_matches_series() {
        // direct power series for I_k(z)
        fn i_series(k: u32, z: f64) -> f64 {
            let mut term = (0.5 * z).powi(k as i32) / (1..=k).map(|v| v as f64).product::<f64>().max(1.0);
            let mut sum = term;
            for m in 1..200 {
                term *= 0.25 * z * z / (m as f64 * (m + k) as f64);
                sum += term;
            }
            sum
        }
        for &z in &[0.5, 3.0, 12.0] {
            let seq = bessel_i_scaled_sequence(z, 6);
            for k in 0..=6u32 {
                let want = i_series(k, z) * (-z).exp();
                assert!((seq[k as usize] - want).abs() < 1e-12 * want.max(1e-3), "z={z}, k={k}");
            }
        }
    }

    #[test]
    fn marcum_matches_rician_density_integral() {
        fn i0(x: f64) -> f64 {
            let mut t = 1.0;
            let mut s = 1.0;
            for m in 1..400 {
                t *= 0.25 * x * x / (m as f64 * m as f64);
                s += t;
                if t < 1e-18 * s {
                    break;
                }
            }
            s
        }
        for &(a, b) in &[(1.0, 0.5), (1.4142, 2.0), (3.162, 3.0), (2.0, 5.0), (0.3, 0.1)] {
            let tail = integrate(
                |x: f64| x * (-(x * x + a * a) / 2.0).exp() * i0(a * x),
                0.0,
                b,
                QuadOptions::tolerances(1e-14, 1e-13),
            );
            let want = 1.0 - tail.value;
            let got = marcum_q1(a, b);
            assert!((got - want).abs() < 1e-9, "a={a} b={b}: {got} vs {want}");
        }
    }

    #[test]
    fn marcum_edges() {
        assert_eq!(marcum_q1(2.0, 0.0), 1.0);
        assert!((marcum_q1(0.0, 1.3) - (-0.5f64 * 1.69).exp()).abs() < 1e-15);
        assert!(marcum_q1(1.0, 60.0) < 1e-300);
    }

    #[test]
    fn poisson_support_mass() {
        for &mu in &[0.3, 5.0, 40.0, 850.0] {
            let s = poisson_support(mu, 1e-12);
            let mass: f64 = s.iter().map(|v| v.1).sum();
            assert!((mass - 1.0).abs() < 1e-12);
            let mean: f64 = s.iter().map(|v| v.0 as f64 * v.1).sum();
            assert!((mean - mu).abs() < 1e-6 * mu.max(1.0), "{mu}: {mean}");
        }
    }

    #[test]
    fn ln_factorial_continuity() {
        let exact: f64 = (2..=70u32).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(70) - exact).abs() < 1e-10);
    }
}
