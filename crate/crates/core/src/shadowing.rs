//! Per-base-station attenuation under the three shadowing models.
//!
//! Every model draws obstacle counts `r` and sets `T = K^r`. In correlated
//! mode all points of a shadowing cell share one draw; in independent mode
//! each point gets its own draw from the same per-cell law. Cell-level
//! draws and per-point draws come from separate random streams so the two
//! modes can be compared on common random numbers.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::geometry::{grid_cell, OriginIndex, poisson_draw, Point, PointPattern, SegmentSet};
use crate::rng::{Purpose, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    Correlated,
    Independent,
}

impl CorrelationMode {
    pub const BOTH: [CorrelationMode; 2] = [CorrelationMode::Correlated, CorrelationMode::Independent];

    pub fn as_str(&self) -> &'static str {
        match self {
            CorrelationMode::Correlated => "correlated",
            CorrelationMode::Independent => "independent",
        }
    }
}

impl std::fmt::Display for CorrelationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mean obstacle count used by the independent approximation of the
/// Boolean segment model, as a function of link length `d`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependentMean {
    /// `2 lambda_b l d / pi`, the expected number of uniformly oriented
    /// length-`l` segments crossing a link of length `d`.
    #[default]
    Crossing,
    /// `lambda_b d / (2 pi)`, without the segment length.
    LengthFree,
}

impl IndependentMean {
    pub fn mean(&self, obstacle_intensity: f64, segment_length: f64, link: f64) -> f64 {
        match self {
            IndependentMean::Crossing => 2.0 * obstacle_intensity * segment_length * link / PI,
            IndependentMean::LengthFree => obstacle_intensity * link / (2.0 * PI),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShadowModel {
    /// Square tessellation of side `cell_size`; cell `(i, j)` carries
    /// `Poisson(lambda_b * cell_size * sqrt(i^2 + j^2))` obstacles.
    Grid {
        cell_size: f64,
        obstacle_intensity: f64,
        attenuation: f64,
    },
    /// Matern cells; the daughters of mother `X` carry
    /// `Poisson(lambda_b * |X|)` obstacles.
    Cluster {
        obstacle_intensity: f64,
        attenuation: f64,
    },
    /// Physical segment obstacles; correlated mode counts true crossings.
    Boolean {
        obstacle_intensity: f64,
        segment_length: f64,
        attenuation: f64,
        #[serde(default)]
        independent_mean: IndependentMean,
    },
}

impl ShadowModel {
    pub fn attenuation(&self) -> f64 {
        match *self {
            ShadowModel::Grid { attenuation, .. }
            | ShadowModel::Cluster { attenuation, .. }
            | ShadowModel::Boolean { attenuation, .. } => attenuation,
        }
    }

    pub fn obstacle_intensity(&self) -> f64 {
        match *self {
            ShadowModel::Grid {
                obstacle_intensity, ..
            }
            | ShadowModel::Cluster {
                obstacle_intensity, ..
            }
            | ShadowModel::Boolean {
                obstacle_intensity, ..
            } => obstacle_intensity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.attenuation();
        ensure(k > 0.0 && k <= 1.0, || format!("attenuation must lie in (0, 1], got {k}"))?;
        let lb = self.obstacle_intensity();
        ensure(lb >= 0.0 && lb.is_finite(), || {
            format!("obstacle intensity must be non-negative, got {lb}")
        })?;
        match *self {
            ShadowModel::Grid { cell_size, .. } => ensure(cell_size > 0.0 && cell_size.is_finite(), || {
                format!("cell size must be positive, got {cell_size}")
            }),
            ShadowModel::Boolean { segment_length, .. } => {
                ensure(segment_length > 0.0 && segment_length.is_finite(), || {
                    format!("segment length must be positive, got {segment_length}")
                })
            }
            ShadowModel::Cluster { .. } => Ok(()),
        }
    }
}

/// Identifier of the shadowing cell a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellLabel {
    Grid(i64, i64),
    Mother(usize),
    /// Boolean model: cells are induced by the obstacles themselves, so a
    /// point is labelled by its own index.
    Point(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowedPattern {
    pub pattern: PointPattern,
    pub attenuation: Vec<f64>,
    pub obstacle_counts: Vec<u32>,
    pub labels: Vec<CellLabel>,
    pub mode: CorrelationMode,
}

impl ShadowedPattern {
    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.pattern.points.iter().zip(self.attenuation.iter().copied())
    }
}

fn finish(
    pattern: &PointPattern,
    counts: Vec<u32>,
    labels: Vec<CellLabel>,
    attenuation: f64,
    mode: CorrelationMode,
) -> ShadowedPattern {
    let t = counts.iter().map(|&r| attenuation.powi(r as i32)).collect();
    ShadowedPattern {
        pattern: pattern.clone(),
        attenuation: t,
        obstacle_counts: counts,
        labels,
        mode,
    }
}

/// Draws counts for labelled points with label-dependent Poisson means.
fn draw_counts(
    labels: &[CellLabel],
    means: &[f64],
    mode: CorrelationMode,
    seed: Seed,
) -> Vec<u32> {
    match mode {
        CorrelationMode::Correlated => {
            let mut rng = seed.rng(Purpose::CellShadow);
            let mut shared: HashMap<CellLabel, u32> = HashMap::new();
            labels
                .iter()
                .zip(means)
                .map(|(label, &mu)| *shared.entry(*label).or_insert_with(|| poisson_draw(mu, &mut rng)))
                .collect()
        }
        CorrelationMode::Independent => {
            let mut rng = seed.rng(Purpose::PointShadow);
            means.iter().map(|&mu| poisson_draw(mu, &mut rng)).collect()
        }
    }
}

/// Grid tessellation shadowing.
pub fn assign_grid(
    pattern: &PointPattern,
    model: &ShadowModel,
    mode: CorrelationMode,
    seed: Seed,
) -> Result<ShadowedPattern> {
    let ShadowModel::Grid {
        cell_size,
        obstacle_intensity,
        attenuation,
    } = *model
    else {
        return Err(Error::Parameter("assign_grid needs a grid shadow model".into()));
    };
    model.validate()?;
    let labels: Vec<CellLabel> = pattern
        .points
        .iter()
        .map(|p| {
            let (i, j) = grid_cell(*p, cell_size);
            CellLabel::Grid(i, j)
        })
        .collect();
    let means: Vec<f64> = labels
        .iter()
        .map(|l| match *l {
            CellLabel::Grid(i, j) => obstacle_intensity * cell_size * ((i * i + j * j) as f64).sqrt(),
            _ => unreachable!(),
        })
        .collect();
    let counts = draw_counts(&labels, &means, mode, seed);
    Ok(finish(pattern, counts, labels, attenuation, mode))
}

/// Cluster shadowing: the cell of a daughter is its mother.
pub fn assign_cluster(
    pattern: &PointPattern,
    model: &ShadowModel,
    mode: CorrelationMode,
    seed: Seed,
) -> Result<ShadowedPattern> {
    let ShadowModel::Cluster {
        obstacle_intensity,
        attenuation,
    } = *model
    else {
        return Err(Error::Parameter("assign_cluster needs a cluster shadow model".into()));
    };
    model.validate()?;
    let index = pattern
        .mother_index
        .as_ref()
        .ok_or_else(|| Error::Structural("cluster shadowing needs per-point mother indices".into()))?;
    if index.len() != pattern.len() || index.iter().any(|&m| m >= pattern.mothers.len()) {
        return Err(Error::Structural("mother indices do not match the mother list".into()));
    }
    let labels: Vec<CellLabel> = index.iter().map(|&m| CellLabel::Mother(m)).collect();
    let means: Vec<f64> = index
        .iter()
        .map(|&m| obstacle_intensity * pattern.mothers[m].norm())
        .collect();
    let counts = draw_counts(&labels, &means, mode, seed);
    Ok(finish(pattern, counts, labels, attenuation, mode))
}

/// Boolean segment shadowing. Correlated mode is the physical ground truth
/// (exact crossing counts); independent mode draws i.i.d. Poisson counts
/// with a distance-dependent mean.
pub fn assign_boolean(
    pattern: &PointPattern,
    segments: &SegmentSet,
    model: &ShadowModel,
    mode: CorrelationMode,
    seed: Seed,
) -> Result<ShadowedPattern> {
    let ShadowModel::Boolean {
        obstacle_intensity,
        segment_length,
        attenuation,
        independent_mean,
    } = *model
    else {
        return Err(Error::Parameter("assign_boolean needs a Boolean shadow model".into()));
    };
    model.validate()?;
    let labels: Vec<CellLabel> = (0..pattern.len()).map(CellLabel::Point).collect();
    let counts = match mode {
        CorrelationMode::Correlated => {
            let index = OriginIndex::new(segments);
            pattern.points.iter().map(|p| index.count(*p)).collect()
        }
        CorrelationMode::Independent => {
            let mut rng = seed.rng(Purpose::PointShadow);
            pattern
                .points
                .iter()
                .map(|p| {
                    let mu = independent_mean.mean(obstacle_intensity, segment_length, p.norm());
                    poisson_draw(mu, &mut rng)
                })
                .collect()
        }
    };
    Ok(finish(pattern, counts, labels, attenuation, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_matern, sample_ppp, Intensity, Segment, Window};

    fn grid(cell_size: f64, lb: f64, k: f64) -> ShadowModel {
        ShadowModel::Grid {
            cell_size,
            obstacle_intensity: lb,
            attenuation: k,
        }
    }

    fn pattern_of(points: Vec<Point>) -> PointPattern {
        PointPattern {
            points,
            mother_index: None,
            mothers: Vec::new(),
            intensity: Intensity::Poisson { intensity: 1.0 },
            window: Window::new(100.0).unwrap(),
        }
    }

    #[test]
    fn unit_attenuation_means_no_shadowing() {
        let p = sample_ppp(1.0, Window::new(10.0).unwrap(), Seed::from(3)).unwrap();
        for mode in CorrelationMode::BOTH {
            let s = assign_grid(&p, &grid(2.0, 1.0, 1.0), mode, Seed::from(3)).unwrap();
            assert!(s.attenuation.iter().all(|&t| t == 1.0));
        }
    }

    #[test]
    fn correlated_points_in_one_cell_share_attenuation() {
        let p = pattern_of(vec![Point::new(2.1, 0.9), Point::new(1.6, 1.4), Point::new(-3.0, 0.0)]);
        for rep in 0..50 {
            let s = assign_grid(&p, &grid(1.0, 1.0, 0.1), CorrelationMode::Correlated, Seed::new(1, rep)).unwrap();
            assert_eq!(s.labels[0], CellLabel::Grid(2, 1));
            assert_eq!(s.labels[1], CellLabel::Grid(2, 1));
            assert_eq!(s.attenuation[0].to_bits(), s.attenuation[1].to_bits());
        }
    }

    #[test]
    fn origin_cell_is_unshadowed() {
        let p = pattern_of(vec![Point::new(0.2, -0.3)]);
        for mode in CorrelationMode::BOTH {
            let s = assign_grid(&p, &grid(1.0, 5.0, 0.1), mode, Seed::from(8)).unwrap();
            assert_eq!(s.attenuation[0], 1.0);
        }
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let p = pattern_of(vec![Point::new(1.0, 1.0)]);
        let cluster = ShadowModel::Cluster {
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        };
        assert!(matches!(
            assign_grid(&p, &cluster, CorrelationMode::Correlated, Seed::from(0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            assign_cluster(&p, &cluster, CorrelationMode::Correlated, Seed::from(0)),
            Err(Error::Structural(_))
        ));
        assert!(assign_grid(&p, &grid(1.0, 1.0, 0.0), CorrelationMode::Correlated, Seed::from(0)).is_err());
    }

    #[test]
    fn independent_grid_mean_matches_poisson_pgf() {
        // cell (3, 4) with unit cell size: mean 5
        let k: f64 = 0.5;
        let p = pattern_of(vec![Point::new(3.0, 4.0); 1000]);
        let mut sum = 0.0;
        let mut n = 0usize;
        for rep in 0..100 {
            let s = assign_grid(&p, &grid(1.0, 1.0, k), CorrelationMode::Independent, Seed::new(11, rep)).unwrap();
            sum += s.attenuation.iter().sum::<f64>();
            n += s.len();
        }
        let expect = (-5.0 * (1.0 - k)).exp();
        let var = (-5.0 * (1.0 - k * k)).exp() - expect * expect;
        let se = (var / n as f64).sqrt();
        assert!((sum / n as f64 - expect).abs() < 4.0 * se, "{} vs {}", sum / n as f64, expect);
    }

    #[test]
    fn cluster_daughters_share_and_origin_mother_is_clear() {
        let mut p = pattern_of(vec![Point::new(0.1, 0.0), Point::new(0.0, 0.2), Point::new(5.0, 0.0), Point::new(5.2, 0.1)]);
        p.mothers = vec![Point::ORIGIN, Point::new(5.0, 0.1)];
        p.mother_index = Some(vec![0, 0, 1, 1]);
        let model = ShadowModel::Cluster {
            obstacle_intensity: 1.0,
            attenuation: 0.1,
        };
        for rep in 0..20 {
            let s = assign_cluster(&p, &model, CorrelationMode::Correlated, Seed::new(2, rep)).unwrap();
            assert_eq!(s.attenuation[0], 1.0);
            assert_eq!(s.attenuation[1], 1.0);
            assert_eq!(s.attenuation[2], s.attenuation[3]);
        }
    }

    #[test]
    fn independent_cluster_mean_matches_pgf() {
        let k = 0.1;
        let n_daughters = 2000;
        let mut p = pattern_of(vec![Point::new(2.0, 0.0); n_daughters]);
        p.mothers = vec![Point::new(2.0, 0.0)];
        p.mother_index = Some(vec![0; n_daughters]);
        let model = ShadowModel::Cluster {
            obstacle_intensity: 1.0,
            attenuation: k,
        };
        let mut sum = 0.0;
        let reps = 50;
        for rep in 0..reps {
            let s = assign_cluster(&p, &model, CorrelationMode::Independent, Seed::new(4, rep)).unwrap();
            sum += s.attenuation.iter().sum::<f64>();
        }
        let n = (reps as usize * n_daughters) as f64;
        let expect = (-2.0f64 * 0.9).exp();
        let var = (-2.0f64 * (1.0 - k * k)).exp() - expect * expect;
        assert!((sum / n - expect).abs() < 4.0 * (var / n).sqrt());
    }

    #[test]
    fn boolean_without_segments_is_clear() {
        let p = sample_ppp(1.0, Window::new(5.0).unwrap(), Seed::from(1)).unwrap();
        let model = ShadowModel::Boolean {
            obstacle_intensity: 0.5,
            segment_length: 5.0,
            attenuation: 0.01,
            independent_mean: IndependentMean::Crossing,
        };
        let s = assign_boolean(&p, &SegmentSet::empty(5.0), &model, CorrelationMode::Correlated, Seed::from(1)).unwrap();
        assert!(s.attenuation.iter().all(|&t| t == 1.0));
    }

    #[test]
    fn colinear_stations_behind_one_segment_share_its_crossing() {
        let segs = SegmentSet {
            segments: vec![Segment {
                center: Point::new(1.0, 0.0),
                length: 1.0,
                angle: PI / 2.0,
            }],
            center_intensity: 1.0,
            length: 1.0,
        };
        let p = pattern_of(vec![Point::new(2.0, 0.0), Point::new(4.0, 0.0), Point::new(0.5, 0.0)]);
        let model = ShadowModel::Boolean {
            obstacle_intensity: 1.0,
            segment_length: 1.0,
            attenuation: 0.1,
            independent_mean: IndependentMean::Crossing,
        };
        let s = assign_boolean(&p, &segs, &model, CorrelationMode::Correlated, Seed::from(0)).unwrap();
        assert_eq!(s.obstacle_counts, vec![1, 1, 0]);
    }

    #[test]
    fn shared_counts_are_a_function_of_the_label() {
        let p = sample_matern(0.3, 6.0, 1.0, Window::new(8.0).unwrap(), Seed::from(21)).unwrap();
        let model = ShadowModel::Cluster {
            obstacle_intensity: 1.0,
            attenuation: 0.2,
        };
        let s = assign_cluster(&p, &model, CorrelationMode::Correlated, Seed::from(21)).unwrap();
        let mut seen: HashMap<CellLabel, f64> = HashMap::new();
        for (label, t) in s.labels.iter().zip(&s.attenuation) {
            let prev = *seen.entry(*label).or_insert(*t);
            assert_eq!(prev.to_bits(), t.to_bits());
        }
    }
}
