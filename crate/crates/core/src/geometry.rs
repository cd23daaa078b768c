//! Planar geometry primitives and the four aggregation metrics.
//!
//! All metrics operate on robot center points. Lengths are in whatever unit
//! the caller uses (centimeters for the continuous simulator, lattice
//! constants for the discrete one).

use std::ops::{Add, Mul, Neg, Sub};

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Containment slack used by the enclosing-disc routines.
pub const CONTAINMENT_EPS: f64 = 1e-9;

/// Seed used when no RNG is supplied to [`smallest_enclosing_disc`].
const DEFAULT_SHUFFLE_SEED: u64 = 0x5eed_d15c;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` radians, counter-clockwise from +x.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point2) -> f64 {
        (self - other).norm_sq()
    }

    /// Rotated 90 degrees counter-clockwise.
    pub fn perp(self) -> Self {
        Self {
            x: -self.y,
            y: self.x,
        }
    }

    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    /// Rotate about `center` by `angle` radians.
    pub fn rotate_about(self, center: Point2, angle: f64) -> Self {
        center + (self - center).rotate(angle)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A closed disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Point2,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point2, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Self { center, radius }
    }

    pub fn circumference(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.radius
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.center.dist(p) <= self.radius + CONTAINMENT_EPS * (1.0 + self.radius)
    }

    fn diametral(a: Point2, b: Point2) -> Self {
        Self::new((a + b) * 0.5, a.dist(b) * 0.5)
    }

    /// Circumcircle of three points; `None` when they are (nearly) collinear.
    fn circumscribed(a: Point2, b: Point2, c: Point2) -> Option<Self> {
        let ab = b - a;
        let ac = c - a;
        let d = 2.0 * ab.cross(ac);
        let scale = ab.norm_sq().max(ac.norm_sq());
        if d.abs() <= 1e-14 * scale {
            return None;
        }
        let (b2, c2) = (ab.norm_sq(), ac.norm_sq());
        let ux = (ac.y * b2 - ab.y * c2) / d;
        let uy = (ab.x * c2 - ac.x * b2) / d;
        let off = Point2::new(ux, uy);
        Some(Self::new(a + off, off.norm()))
    }

    /// Smallest disc with all three points on or inside it.
    fn of_three(a: Point2, b: Point2, c: Point2) -> Self {
        let mut best: Option<Disc> = None;
        for (p, q, o) in [(a, b, c), (a, c, b), (b, c, a)] {
            let d = Disc::diametral(p, q);
            if d.contains(o) && best.is_none_or(|bd| d.radius < bd.radius) {
                best = Some(d);
            }
        }
        if let Some(d) = best {
            return d;
        }
        Disc::circumscribed(a, b, c).unwrap_or_else(|| {
            // collinear: the farthest pair spans the rest
            [(a, b), (a, c), (b, c)]
                .into_iter()
                .map(|(p, q)| Disc::diametral(p, q))
                .max_by(|x, y| x.radius.total_cmp(&y.radius))
                .expect("three candidates")
        })
    }
}

fn ensure_non_empty(points: &[Point2]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    Ok(())
}

/// Smallest disc containing every point, using a fixed shuffle seed.
pub fn smallest_enclosing_disc(points: &[Point2]) -> Result<Disc> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SHUFFLE_SEED);
    smallest_enclosing_disc_with_rng(points, &mut rng)
}

/// Randomized incremental (Welzl) smallest enclosing disc, expected linear
/// time. Inputs of at most three points are solved directly.
pub fn smallest_enclosing_disc_with_rng<R: Rng + ?Sized>(
    points: &[Point2],
    rng: &mut R,
) -> Result<Disc> {
    ensure_non_empty(points)?;
    match points {
        [a] => return Ok(Disc::new(*a, 0.0)),
        [a, b] => return Ok(Disc::diametral(*a, *b)),
        [a, b, c] => return Ok(Disc::of_three(*a, *b, *c)),
        _ => {}
    }

    let mut pts = points.to_vec();
    pts.shuffle(rng);

    let mut disc = Disc::new(pts[0], 0.0);
    for i in 1..pts.len() {
        if disc.contains(pts[i]) {
            continue;
        }
        disc = Disc::new(pts[i], 0.0);
        for j in 0..i {
            if disc.contains(pts[j]) {
                continue;
            }
            disc = Disc::diametral(pts[i], pts[j]);
            for k in 0..j {
                if !disc.contains(pts[k]) {
                    // both `i` and `j` must stay on the boundary
                    disc = Disc::circumscribed(pts[i], pts[j], pts[k])
                        .unwrap_or_else(|| Disc::of_three(pts[i], pts[j], pts[k]));
                }
            }
        }
    }
    Ok(disc)
}

/// Vertices of the convex hull in counter-clockwise order (Andrew's
/// monotone chain). Collinear points are dropped.
pub fn convex_hull(points: &[Point2]) -> Result<Vec<Point2>> {
    ensure_non_empty(points)?;
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(pts);
    }

    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(hull)
}

/// Perimeter of the convex hull. A degenerate (collinear) hull is walked
/// out and back, so its perimeter is twice the segment length.
pub fn convex_hull_perimeter(points: &[Point2]) -> Result<f64> {
    let hull = convex_hull(points)?;
    Ok(closed_polyline_length(&hull))
}

fn closed_polyline_length(vertices: &[Point2]) -> f64 {
    if vertices.len() < 2 {
        return 0.0;
    }
    vertices
        .iter()
        .zip(vertices.iter().cycle().skip(1))
        .map(|(a, b)| a.dist(*b))
        .sum()
}

pub fn centroid(points: &[Point2]) -> Result<Point2> {
    ensure_non_empty(points)?;
    let sum = points.iter().fold(Point2::ORIGIN, |acc, &p| acc + p);
    Ok(sum * (1.0 / points.len() as f64))
}

/// Sum of Euclidean distances from each point to the centroid.
///
/// This is a first-moment quantity: distances are not squared.
pub fn dispersion(points: &[Point2]) -> Result<f64> {
    let c = centroid(points)?;
    Ok(points.iter().map(|p| p.dist(c)).sum())
}

/// Fraction of robots in the largest connected component of the contact
/// graph, where robots `i` and `j` are adjacent when their centers are at
/// most `2 * robot_radius + touch_tolerance` apart. Returns 0 for no points.
pub fn cluster_fraction(points: &[Point2], robot_radius: f64, touch_tolerance: f64) -> f64 {
    let n = points.len();
    if n == 0 {
        return 0.0;
    }
    let reach = 2.0 * robot_radius + touch_tolerance;
    let reach_sq = reach * reach;
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].dist_sq(points[j]) <= reach_sq {
                uf.union(i, j);
            }
        }
    }
    largest_component_fraction(&uf.into_labeling())
}

pub(crate) fn largest_component_fraction(labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut counts = vec![0usize; labels.len()];
    for &l in labels {
        counts[l] += 1;
    }
    let largest = counts.into_iter().max().unwrap_or(0);
    largest as f64 / labels.len() as f64
}

/// Sites of a unit triangular lattice in axial coordinates, ordered ring by
/// ring around the origin.
fn hex_ring(k: i64) -> Vec<(i64, i64)> {
    if k == 0 {
        return vec![(0, 0)];
    }
    const DIRS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    let mut out = Vec::with_capacity(6 * k as usize);
    // start at k * direction 4 and walk each side
    let (mut q, mut r) = (DIRS[4].0 * k, DIRS[4].1 * k);
    for dir in DIRS {
        for _ in 0..k {
            out.push((q, r));
            q += dir.0;
            r += dir.1;
        }
    }
    out
}

/// Points of the canonical hexagonally packed arrangement used as the
/// minimum-dispersion reference: sites are filled ring by ring outward from
/// a center site, and within a ring the site that minimizes the running
/// dispersion is taken next (first in ring order on ties).
pub fn hex_packing(n: usize, spacing: f64) -> Vec<Point2> {
    let to_point = |(q, r): (i64, i64)| {
        Point2::new(
            spacing * (q as f64 + r as f64 / 2.0),
            spacing * (r as f64 * 3f64.sqrt() / 2.0),
        )
    };
    let mut chosen: Vec<Point2> = Vec::with_capacity(n);
    let mut ring = 0;
    while chosen.len() < n {
        let mut candidates: Vec<Point2> = hex_ring(ring).into_iter().map(to_point).collect();
        while chosen.len() < n && !candidates.is_empty() {
            let mut best = (f64::INFINITY, 0);
            for (idx, &cand) in candidates.iter().enumerate() {
                chosen.push(cand);
                let disp = dispersion(&chosen).expect("non-empty");
                chosen.pop();
                if disp < best.0 - 1e-12 {
                    best = (disp, idx);
                }
            }
            chosen.push(candidates.remove(best.1));
        }
        ring += 1;
    }
    chosen
}

/// Dispersion of [`hex_packing`]`(n, spacing)`.
pub fn min_dispersion_baseline(n: usize, spacing: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    dispersion(&hex_packing(n, spacing)).expect("n >= 1")
}

/// One timestamped evaluation of all four aggregation metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSample {
    /// Seconds (continuous) or rounds (discrete).
    pub time: f64,
    pub sed_circumference: f64,
    pub hull_perimeter: f64,
    pub dispersion: f64,
    pub cluster_fraction: f64,
}

impl MetricsSample {
    pub fn evaluate(
        time: f64,
        points: &[Point2],
        robot_radius: f64,
        touch_tolerance: f64,
    ) -> Result<Self> {
        Ok(Self {
            time,
            sed_circumference: smallest_enclosing_disc(points)?.circumference(),
            hull_perimeter: convex_hull_perimeter(points)?,
            dispersion: dispersion(points)?,
            cluster_fraction: cluster_fraction(points, robot_radius, touch_tolerance),
        })
    }
}
