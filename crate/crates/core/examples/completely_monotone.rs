//! Finite-difference probe for complete monotonicity on textbook examples,
//! a counterexample, and an analytic Laplace transform.

use shadowcorr::analytic::{cm_probe, cm_probe_with_tolerance, GridParams, GridTransform, InterferenceTransform};
use shadowcorr::CorrelationMode;

fn main() -> shadowcorr::Result<()> {
    let grid: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
    println!("exp(-2x), order 4:        {}", cm_probe(|x| (-2.0 * x).exp(), 4, &grid, 0.05));
    println!("(1 + x)^-2, order 4:      {}", cm_probe(|x| (1.0 + x).powi(-2), 4, &grid, 0.05));
    println!("ln(1 + 1/(x+1)), order 3: {}", cm_probe(|x| (1.0 / (x + 1.0)).ln_1p(), 3, &grid, 0.05));
    println!("sin(x), order 3:          {}", cm_probe(f64::sin, 3, &grid, 0.05));
    let t = GridTransform::new(GridParams::new(1.0, 4.0, 5.0, 1.0, 0.1))?;
    for mode in CorrelationMode::BOTH {
        let ok = cm_probe_with_tolerance(|s| t.laplace(s, mode).unwrap(), 3, &[0.1, 1.0, 4.0], 0.01, t.tolerance());
        println!("grid Laplace {mode}, order 3: {ok}");
    }
    Ok(())
}
