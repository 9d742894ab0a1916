//! Analytic conditional Laplace transforms against Monte Carlo, grid and
//! cluster shadowing, both correlation modes.

use shadowcorr::analytic::{ClusterParams, ClusterTransform, GridParams, GridTransform, InterferenceTransform};
use shadowcorr::shadowing::ShadowModel;
use shadowcorr::simulate::{empirical_laplace, Deployment, Scenario};
use shadowcorr::CorrelationMode;

fn main() -> shadowcorr::Result<()> {
    let reps = 20_000;
    let s_grid = [0.0625, 0.625, 6.25];
    for &delta in &[1.0, 5.0, 15.0] {
        let analytic = GridTransform::new(GridParams::new(1.0, 4.0, delta, 1.0, 0.1))?;
        let shadow = ShadowModel::Grid {
            cell_size: delta,
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        };
        for mode in CorrelationMode::BOTH {
            let sc = Scenario::new(Deployment::Ppp { intensity: 1.0 }, shadow, mode, 4.0)?.with_exclusion(0.0)?;
            let mc = empirical_laplace(&sc, &s_grid, reps, 11)?;
            for (i, &s) in s_grid.iter().enumerate() {
                let a = analytic.laplace(s, mode)?;
                let z = (a - mc.values[i]) / mc.error_at(i);
                println!("grid  delta={delta:<4} {mode:<11} s={s:<7} analytic={a:.5} mc={:.5} z={z:+.2}", mc.values[i]);
            }
        }
    }
    for &ld in &[1.0, 5.0, 10.0] {
        let analytic = ClusterTransform::new(ClusterParams::new(1.0 / ld, ld, 1.0, 4.0, 1.0, 0.1))?;
        let deployment = Deployment::Matern {
            mother_intensity: 1.0 / ld,
            daughters_mean: ld,
            cluster_radius: 1.0,
        };
        let shadow = ShadowModel::Cluster {
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        };
        for mode in CorrelationMode::BOTH {
            let sc = Scenario::new(deployment, shadow, mode, 4.0)?.with_exclusion(0.0)?;
            let mc = empirical_laplace(&sc, &s_grid, reps, 11)?;
            for (i, &s) in s_grid.iter().enumerate() {
                let a = analytic.laplace(s, mode)?;
                let z = (a - mc.values[i]) / mc.error_at(i);
                println!("pcp   ld={ld:<4}    {mode:<11} s={s:<7} analytic={a:.5} mc={:.5} z={z:+.2}", mc.values[i]);
            }
        }
    }
    Ok(())
}
