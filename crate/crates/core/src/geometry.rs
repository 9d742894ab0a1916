//! Spatial processes and the planar predicates they need.
//!
//! All samplers work on a disk window centred at the origin (the typical
//! user). Processes whose points can influence the window from outside
//! (cluster mothers, obstacle centres) are sampled on an inflated disk.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::rng::{Purpose, Seed};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// Sampling disk of radius `r_max` centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    r_max: f64,
}

impl Window {
    pub fn new(r_max: f64) -> Result<Self> {
        ensure(r_max.is_finite() && r_max > 0.0, || {
            format!("window radius must be positive, got {r_max}")
        })?;
        Ok(Self { r_max })
    }

    /// Smallest radius for which the unshadowed mean interference lost
    /// outside the disk, relative to the mean from `[reference, inf)`, stays
    /// below `fraction`:
    /// `(reference / r_max)^(alpha - 2) <= fraction`.
    pub fn for_truncation(alpha: f64, reference: f64, fraction: f64) -> Result<Self> {
        if !(alpha > 2.0) {
            return Err(Error::Divergence(format!("no finite truncation radius for path-loss exponent {alpha} <= 2")));
        }
        ensure(reference > 0.0 && fraction > 0.0 && fraction < 1.0, || {
            format!("bad truncation reference {reference} / fraction {fraction}")
        })?;
        Self::new(reference * fraction.powf(-1.0 / (alpha - 2.0)))
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn area(&self) -> f64 {
        PI * self.r_max * self.r_max
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.norm() <= self.r_max
    }

    pub fn inflated(&self, by: f64) -> Window {
        Window {
            r_max: self.r_max + by.max(0.0),
        }
    }
}

/// Intensities that generated a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Intensity {
    Poisson {
        intensity: f64,
    },
    Matern {
        mother_intensity: f64,
        daughters_mean: f64,
        cluster_radius: f64,
    },
}

impl Intensity {
    /// Mean number of points per unit area.
    pub fn density(&self) -> f64 {
        match *self {
            Intensity::Poisson { intensity } => intensity,
            Intensity::Matern {
                mother_intensity,
                daughters_mean,
                ..
            } => mother_intensity * daughters_mean,
        }
    }
}

/// A realization of base-station locations inside a window.
#[derive(Clone, Debug, PartialEq)]
pub struct PointPattern {
    pub points: Vec<Point>,
    /// Per-point index into `mothers` (cluster processes only).
    pub mother_index: Option<Vec<usize>>,
    pub mothers: Vec<Point>,
    pub intensity: Intensity,
    pub window: Window,
}

impl PointPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite Poisson mean");
    let v: f64 = d.sample(rng);
    v as usize
}

pub(crate) fn poisson_draw<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    poisson_count(mean, rng) as u32
}

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::polar(r, theta)
}

/// Homogeneous PPP of the given intensity restricted to `window`.
pub fn sample_ppp(intensity: f64, window: Window, seed: Seed) -> Result<PointPattern> {
    ensure(intensity >= 0.0 && intensity.is_finite(), || {
        format!("intensity must be non-negative, got {intensity}")
    })?;
    let mut rng = seed.rng(Purpose::Pattern);
    let n = poisson_count(intensity * window.area(), &mut rng);
    let points = (0..n)
        .map(|_| uniform_in_disk(window.r_max(), &mut rng))
        .collect();
    Ok(PointPattern {
        points,
        mother_index: None,
        mothers: Vec::new(),
        intensity: Intensity::Poisson { intensity },
        window,
    })
}

/// Matern cluster process. Mothers are drawn on the window inflated by the
/// cluster radius; daughters falling outside the window are dropped.
pub fn sample_matern(
    mother_intensity: f64,
    daughters_mean: f64,
    cluster_radius: f64,
    window: Window,
    seed: Seed,
) -> Result<PointPattern> {
    ensure(mother_intensity >= 0.0 && mother_intensity.is_finite(), || {
        format!("mother intensity must be non-negative, got {mother_intensity}")
    })?;
    ensure(daughters_mean >= 0.0 && daughters_mean.is_finite(), || {
        format!("mean daughters per mother must be non-negative, got {daughters_mean}")
    })?;
    ensure(cluster_radius > 0.0 && cluster_radius.is_finite(), || {
        format!("cluster radius must be positive, got {cluster_radius}")
    })?;
    let mut rng = seed.rng(Purpose::Pattern);
    let outer = window.inflated(cluster_radius);
    let n_mothers = poisson_count(mother_intensity * outer.area(), &mut rng);
    let mothers: Vec<Point> = (0..n_mothers)
        .map(|_| uniform_in_disk(outer.r_max(), &mut rng))
        .collect();
    let mut points = Vec::new();
    let mut index = Vec::new();
    for (m, mother) in mothers.iter().enumerate() {
        let k = poisson_count(daughters_mean, &mut rng);
        for _ in 0..k {
            let p = *mother + uniform_in_disk(cluster_radius, &mut rng);
            if window.contains(&p) {
                points.push(p);
                index.push(m);
            }
        }
    }
    Ok(PointPattern {
        points,
        mother_index: Some(index),
        mothers,
        intensity: Intensity::Matern {
            mother_intensity,
            daughters_mean,
            cluster_radius,
        },
        window,
    })
}

/// A fixed-length line obstacle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub center: Point,
    pub length: f64,
    /// Orientation in `[0, pi)`.
    pub angle: f64,
}

impl Segment {
    pub fn endpoints(&self) -> (Point, Point) {
        let half = Point::polar(0.5 * self.length, self.angle);
        (self.center - half, self.center + half)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSet {
    pub segments: Vec<Segment>,
    pub center_intensity: f64,
    pub length: f64,
}

impl SegmentSet {
    pub fn empty(length: f64) -> Self {
        Self {
            segments: Vec::new(),
            center_intensity: 0.0,
            length,
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Boolean model of segments: PPP centres on the window inflated by `l/2`,
/// i.i.d. orientations uniform on `[0, pi)`.
pub fn sample_segments(
    center_intensity: f64,
    length: f64,
    window: Window,
    seed: Seed,
) -> Result<SegmentSet> {
    ensure(center_intensity >= 0.0 && center_intensity.is_finite(), || {
        format!("obstacle intensity must be non-negative, got {center_intensity}")
    })?;
    ensure(length > 0.0 && length.is_finite(), || {
        format!("segment length must be positive, got {length}")
    })?;
    let mut rng = seed.rng(Purpose::Obstacles);
    let outer = window.inflated(0.5 * length);
    let n = poisson_count(center_intensity * outer.area(), &mut rng);
    let segments = (0..n)
        .map(|_| {
            let center = uniform_in_disk(outer.r_max(), &mut rng);
            let angle = PI * rng.random::<f64>();
            Segment {
                center,
                length,
                angle,
            }
        })
        .collect();
    Ok(SegmentSet {
        segments,
        center_intensity,
        length,
    })
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test; touching endpoints count.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Number of obstacles whose closed segment meets the closed link `[a, b]`.
pub fn count_crossings(segments: &SegmentSet, a: Point, b: Point) -> u32 {
    let reach = a.dist(&b);
    segments
        .segments
        .iter()
        // a segment whose centre is farther than reach + l/2 from `a` cannot touch the link
        .filter(|s| s.center.dist(&a) <= reach + 0.5 * s.length + 1e-12)
        .filter(|s| {
            let (q1, q2) = s.endpoints();
            segments_intersect(a, b, q1, q2)
        })
        .count() as u32
}

/// Angular bucketing of segments as seen from the origin, for counting
/// crossings of many links that all start at the origin.
#[derive(Clone, Debug)]
pub struct OriginIndex {
    bins: Vec<Vec<u32>>,
    ends: Vec<(Point, Point)>,
    min_dist: Vec<f64>,
}

impl OriginIndex {
    pub fn new(segments: &SegmentSet) -> Self {
        let n_bins = (segments.len() / 4).clamp(1, 4096);
        let width = 2.0 * PI / n_bins as f64;
        let mut bins = vec![Vec::new(); n_bins];
        let mut ends = Vec::with_capacity(segments.len());
        let mut min_dist = Vec::with_capacity(segments.len());
        for (k, seg) in segments.segments.iter().enumerate() {
            let (q1, q2) = seg.endpoints();
            ends.push((q1, q2));
            min_dist.push(distance_to_segment(Point::ORIGIN, q1, q2));
            let a1 = q1.y.atan2(q1.x);
            let a2 = q2.y.atan2(q2.x);
            let mut span = a2 - a1;
            if span > PI {
                span -= 2.0 * PI;
            } else if span < -PI {
                span += 2.0 * PI;
            }
            let (lo, sweep) = if span >= 0.0 { (a1, span) } else { (a2, -span) };
            // segments passing (nearly) through the origin are seen from every angle
            let (first, count) = if orient(q1, q2, Point::ORIGIN).abs() <= 1e-12 * seg.length * seg.length {
                (0, n_bins)
            } else {
                let pad = 1e-9;
                let start = ((lo - pad) / width).floor() as i64;
                let stop = ((lo + sweep + pad) / width).floor() as i64;
                (start.rem_euclid(n_bins as i64) as usize, ((stop - start + 1) as usize).min(n_bins))
            };
            for b in 0..count {
                bins[(first + b) % n_bins].push(k as u32);
            }
        }
        Self { bins, ends, min_dist }
    }

    /// Same count as [`count_crossings`] for the link from the origin to `b`.
    pub fn count(&self, b: Point) -> u32 {
        let n_bins = self.bins.len();
        let width = 2.0 * PI / n_bins as f64;
        let bin = ((b.y.atan2(b.x) / width).floor() as i64).rem_euclid(n_bins as i64) as usize;
        let r = b.norm();
        self.bins[bin]
            .iter()
            .filter(|&&k| {
                let k = k as usize;
                self.min_dist[k] <= r + 1e-12 && segments_intersect(Point::ORIGIN, b, self.ends[k].0, self.ends[k].1)
            })
            .count() as u32
    }
}

fn distance_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Point::new(a.x + t * dx, a.y + t * dy).dist(&p)
}

/// Square-grid cell index with the origin at the centre of cell `(0, 0)`.
/// Cells are half-open: `[(i - 1/2) d, (i + 1/2) d)`.
pub fn grid_cell(p: Point, cell_size: f64) -> (i64, i64) {
    let i = (p.x / cell_size + 0.5).floor() as i64;
    let j = (p.y / cell_size + 0.5).floor() as i64;
    (i, j)
}
