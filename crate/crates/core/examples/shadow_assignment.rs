//! Correlated and independent shadow assignment on one frozen pattern for
//! the three cell models.

use std::collections::HashMap;

use shadowcorr::geometry::{sample_matern, sample_ppp, sample_segments, Window};
use shadowcorr::shadowing::{assign_boolean, assign_cluster, assign_grid, CellLabel, ShadowModel, ShadowedPattern};
use shadowcorr::{CorrelationMode, Seed};

fn describe(name: &str, sp: &ShadowedPattern) {
    let mut per_cell: HashMap<CellLabel, Vec<f64>> = HashMap::new();
    for (label, t) in sp.labels.iter().zip(&sp.attenuation) {
        per_cell.entry(*label).or_default().push(*t);
    }
    let shared = per_cell.values().filter(|v| v.len() > 1 && v.iter().all(|t| *t == v[0])).count();
    let multi = per_cell.values().filter(|v| v.len() > 1).count();
    let mean_t = sp.attenuation.iter().sum::<f64>() / sp.len().max(1) as f64;
    println!(
        "{name:<8} {:<11} {:>4} points, {:>4} cells, {shared:>3}/{multi:<3} multi-point cells share one draw, mean T {mean_t:.4}",
        sp.mode.as_str(),
        sp.len(),
        per_cell.len()
    );
}

fn main() -> shadowcorr::Result<()> {
    let window = Window::new(8.0)?;
    let seed = Seed::new(3, 0);
    let ppp = sample_ppp(1.0, window, seed)?;
    let pcp = sample_matern(0.2, 5.0, 1.0, window, seed)?;
    let grid = ShadowModel::Grid {
        cell_size: 5.0,
        obstacle_intensity: 1.0,
        attenuation: 0.1,
    };
    let cluster = ShadowModel::Cluster {
        obstacle_intensity: 1.0,
        attenuation: 0.1,
    };
    let boolean = ShadowModel::Boolean {
        obstacle_intensity: 0.5,
        segment_length: 5.0,
        attenuation: 0.01,
        independent_mean: Default::default(),
    };
    let segments = sample_segments(0.5, 5.0, window, seed)?;
    for mode in CorrelationMode::BOTH {
        describe("grid", &assign_grid(&ppp, &grid, mode, seed)?);
        describe("cluster", &assign_cluster(&pcp, &cluster, mode, seed)?);
        describe("boolean", &assign_boolean(&ppp, &segments, &boolean, mode, seed)?);
    }
    Ok(())
}
