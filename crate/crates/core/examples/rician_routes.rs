//! Rician serving link: Marcum-Q route against the double-series route on
//! the same interference samples.

use shadowcorr::metrics::{coverage_rayleigh_samples, coverage_rician, coverage_rician_series, db_to_linear, LinkModel};
use shadowcorr::shadowing::ShadowModel;
use shadowcorr::simulate::{interference_values, Deployment, Scenario};
use shadowcorr::CorrelationMode;

fn main() -> shadowcorr::Result<()> {
    let sc = Scenario::new(
        Deployment::Ppp { intensity: 1.0 },
        ShadowModel::Grid {
            cell_size: 5.0,
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        },
        CorrelationMode::Correlated,
        4.0,
    )?
    .with_exclusion(0.0)?;
    let samples = interference_values(&sc, 10_000, 5)?;
    for kappa in [0.0, 1.0, 5.0] {
        let link = LinkModel::rician(kappa, sc.link_distance, sc.alpha);
        for db in [-5.0, 0.0, 5.0, 10.0] {
            let th = db_to_linear(db);
            let q = coverage_rician(&samples, th, &link, 0.0)?;
            let s = coverage_rician_series(&samples, th, &link, 0.0, 40)?;
            let r = coverage_rayleigh_samples(&samples, th, &LinkModel::of(&sc), 0.0)?;
            println!(
                "kappa={kappa} theta={db:>5} dB  marcum {:.6}  series {:.6} (remainder {:.1e})  rayleigh {:.6}",
                q.value, s.estimate.value, s.remainder, r.value
            );
        }
    }
    Ok(())
}
