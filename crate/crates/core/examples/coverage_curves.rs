//! Rayleigh coverage over the threshold grid: analytic transform against
//! Monte Carlo with common random numbers.

use shadowcorr::analytic::{GridParams, GridTransform};
use shadowcorr::metrics::{coverage_rayleigh, coverage_rayleigh_samples, db_to_linear, LinkModel};
use shadowcorr::shadowing::ShadowModel;
use shadowcorr::simulate::{interference_values, Deployment, Scenario};
use shadowcorr::CorrelationMode;

fn main() -> shadowcorr::Result<()> {
    let delta = 1.0;
    let noise = 0.01;
    let t = GridTransform::new(GridParams::new(1.0, 4.0, delta, 1.0, 0.1))?;
    let base = Scenario::new(
        Deployment::Ppp { intensity: 1.0 },
        ShadowModel::Grid {
            cell_size: delta,
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        },
        CorrelationMode::Correlated,
        4.0,
    )?
    .with_exclusion(0.0)?
    .with_noise(noise);
    let link = LinkModel::of(&base);
    let cor = interference_values(&base, 20_000, 7)?;
    let ind = interference_values(&base.with_mode(CorrelationMode::Independent), 20_000, 7)?;
    println!("theta_dB  analytic_cor  analytic_ind  mc_cor            mc_ind");
    for db in (-10..=20).step_by(2) {
        let th = db_to_linear(db as f64);
        let ac = coverage_rayleigh(&t, CorrelationMode::Correlated, th, &link, noise)?;
        let ai = coverage_rayleigh(&t, CorrelationMode::Independent, th, &link, noise)?;
        let mc = coverage_rayleigh_samples(&cor, th, &link, noise)?;
        let mi = coverage_rayleigh_samples(&ind, th, &link, noise)?;
        println!(
            "{db:>8}  {ac:>12.5}  {ai:>12.5}  {:.5}+-{:.5}  {:.5}+-{:.5}",
            mc.value, mc.stderr, mi.value, mi.stderr
        );
    }
    Ok(())
}
