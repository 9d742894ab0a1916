//! Boolean segment obstacles: exact crossing counts against the two
//! independent approximations of the per-link obstacle mean.

use shadowcorr::metrics::{coverage_rayleigh_samples, db_to_linear, LinkModel};
use shadowcorr::shadowing::{IndependentMean, ShadowModel};
use shadowcorr::simulate::{interference_values, Deployment, Scenario};
use shadowcorr::CorrelationMode;

fn main() -> shadowcorr::Result<()> {
    let reps = 10_000;
    for (lb, len) in [(0.1, 5.0), (0.5, 5.0), (0.5, 10.0)] {
        let scenario = |rule| {
            Scenario::new(
                Deployment::Ppp { intensity: 1.0 },
                ShadowModel::Boolean {
                    obstacle_intensity: lb,
                    segment_length: len,
                    attenuation: 0.01,
                    independent_mean: rule,
                },
                CorrelationMode::Correlated,
                4.0,
            )?
            .with_exclusion(0.0)
        };
        let exact = scenario(IndependentMean::Crossing)?;
        let link = LinkModel::of(&exact);
        let cor = interference_values(&exact, reps, 8)?;
        let crossing = interference_values(&exact.with_mode(CorrelationMode::Independent), reps, 8)?;
        let length_free = interference_values(&scenario(IndependentMean::LengthFree)?.with_mode(CorrelationMode::Independent), reps, 8)?;
        for db in [0.0, 10.0] {
            let th = db_to_linear(db);
            let c = coverage_rayleigh_samples(&cor, th, &link, 0.0)?.value;
            let a = coverage_rayleigh_samples(&crossing, th, &link, 0.0)?.value;
            let b = coverage_rayleigh_samples(&length_free, th, &link, 0.0)?.value;
            println!(
                "lambda_b={lb} l={len:<4} {db:>4} dB  exact {c:.4}  crossing-mean {a:.4} ({:+.1}%)  length-free {b:.4} ({:+.1}%)",
                100.0 * (c / a - 1.0),
                100.0 * (c / b - 1.0)
            );
        }
    }
    Ok(())
}
