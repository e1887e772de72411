//! Douglas-Peucker simplification of polylines and rings.
//!
//! Besides the retained vertices, every result carries the mapping from
//! each simplified edge back to the run of original vertices it replaced.
//! The fitting stage works on those runs, not on the simplified edges.
//!
//! Tolerance presets, all in meters of a projected CRS:
//!
//! | preset    | ε     | use                                          |
//! |-----------|-------|----------------------------------------------|
//! | cadastral | 0.1   | surveys, keeps every real turning point      |
//! | default   | 0.5   | general cleanup of raster traces             |
//! | planning  | 1.0   | urban planning / navigation maps (0.5–2 m)   |

use serde::{Deserialize, Serialize};
use std::ops::Sub;
use thiserror::Error;

use crate::geometry::{perpendicular_distance, Point, Polyline, Ring};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplifyError {
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplifyConfig {
    epsilon: f64,
}

impl SimplifyConfig {
    pub const DEFAULT_EPSILON: f64 = 0.5;
    pub const CADASTRAL_EPSILON: f64 = 0.1;
    pub const PLANNING_EPSILON: f64 = 1.0;

    pub fn new(epsilon: f64) -> Result<Self, SimplifyError> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(Self { epsilon })
        } else {
            Err(SimplifyError::InvalidEpsilon(epsilon))
        }
    }

    pub fn cadastral() -> Self {
        Self { epsilon: Self::CADASTRAL_EPSILON }
    }

    pub fn planning() -> Self {
        Self { epsilon: Self::PLANNING_EPSILON }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        Self { epsilon: Self::DEFAULT_EPSILON }
    }
}

/// Contiguous original vertices collapsed into one simplified edge.
///
/// `start` and `end` are the original indices of the edge endpoints and
/// are both part of the run. On rings a run may wrap past the last index,
/// in which case `end < start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegmentRun {
    pub start: usize,
    pub end: usize,
    /// Number of original vertices in the run, endpoints included.
    pub count: usize,
}

impl SegmentRun {
    /// Run from `start` to `end` over a sequence of length `n`.
    pub fn cyclic(start: usize, end: usize, n: usize) -> Self {
        let count = if end > start { end - start + 1 } else { end + n - start + 1 };
        Self { start, end, count }
    }

    pub fn simplified_edge(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    /// Original indices in traversal order; `n` is the original length.
    pub fn indices(&self, n: usize) -> impl Iterator<Item = usize> {
        let start = self.start;
        (0..self.count).map(move |k| (start + k) % n)
    }

    /// Indices strictly between the endpoints.
    pub fn interior(&self, n: usize) -> impl Iterator<Item = usize> {
        let start = self.start;
        (1..self.count.saturating_sub(1)).map(move |k| (start + k) % n)
    }

    pub fn points<'a>(&self, vertices: &'a [Point]) -> impl Iterator<Item = Point> + 'a {
        let n = vertices.len();
        self.indices(n).map(move |i| vertices[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplifyResult {
    /// Strictly increasing original indices of the surviving vertices.
    pub retained: Vec<usize>,
    pub runs: Vec<SegmentRun>,
    /// Tolerance actually applied. Differs from the configured one only
    /// when a ring had to be re-simplified to keep three vertices.
    pub epsilon_used: f64,
}

/// Distance used for the split decision. A chord with coincident endpoints
/// (a polyline that returns to an earlier point) measures plain distance
/// to that point instead.
fn deviation(p: Point, a: Point, b: Point) -> f64 {
    perpendicular_distance(p, a, b).unwrap_or_else(|_| p.distance(a))
}

/// Marks the vertices of `points` kept by Douglas-Peucker.
fn dp_mark(points: &[Point], epsilon: f64, keep: &mut [bool]) {
    let last = points.len() - 1;
    keep[0] = true;
    keep[last] = true;
    let mut stack = vec![(0usize, last)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (a, b) = (points[lo], points[hi]);
        let mut far = lo;
        let mut d_max = -1.0;
        for (k, &p) in points.iter().enumerate().take(hi).skip(lo + 1) {
            let d = deviation(p, a, b);
            // strict comparison keeps the lowest index on ties
            if d > d_max {
                d_max = d;
                far = k;
            }
        }
        if d_max > epsilon {
            keep[far] = true;
            stack.push((far, hi));
            stack.push((lo, far));
        }
    }
}

fn dp_points(points: &[Point], epsilon: f64) -> Vec<usize> {
    let mut keep = vec![false; points.len()];
    dp_mark(points, epsilon, &mut keep);
    keep.iter().enumerate().filter_map(|(i, &k)| k.then_some(i)).collect()
}

fn open_runs(retained: &[usize], n: usize) -> Vec<SegmentRun> {
    retained.windows(2).map(|w| SegmentRun::cyclic(w[0], w[1], n)).collect()
}

/// Runs between consecutive retained indices of a ring, closing back to
/// the first retained index.
pub fn ring_runs(retained: &[usize], n: usize) -> Vec<SegmentRun> {
    let k = retained.len();
    (0..k).map(|i| SegmentRun::cyclic(retained[i], retained[(i + 1) % k], n)).collect()
}

/// Simplifies an open polyline. Endpoints are always retained.
pub fn douglas_peucker(line: &Polyline, cfg: &SimplifyConfig) -> SimplifyResult {
    let pts = line.vertices();
    let retained = dp_points(pts, cfg.epsilon);
    let runs = open_runs(&retained, pts.len());
    SimplifyResult { retained, runs, epsilon_used: cfg.epsilon }
}

const BRUTE_FORCE_ANCHOR_LIMIT: usize = 4096;

fn squared_distance(points: &[Point], i: usize, j: usize) -> f64 {
    let dx = points[j].x - points[i].x;
    let dy = points[j].y - points[i].y;
    dx * dx + dy * dy
}

/// Pair of indices `(i, j)`, `i < j`, at maximum mutual distance. Ties go
/// to the lexicographically smallest pair.
pub fn diameter_pair(points: &[Point]) -> (usize, usize) {
    if points.len() <= BRUTE_FORCE_ANCHOR_LIMIT {
        diameter_pair_exhaustive(points)
    } else {
        diameter_pair_hull(points)
    }
}

pub(crate) fn diameter_pair_exhaustive(points: &[Point]) -> (usize, usize) {
    best_pair(points, (0..points.len()).collect())
}

fn best_pair(points: &[Point], candidates: Vec<usize>) -> (usize, usize) {
    let mut best = (0, 1);
    let mut best_d = -1.0;
    for (ci, &i) in candidates.iter().enumerate() {
        for &j in &candidates[ci + 1..] {
            let (i, j) = if i < j { (i, j) } else { (j, i) };
            let d = squared_distance(points, i, j);
            if d > best_d || (d == best_d && (i, j) < best) {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Same answer as the exhaustive search, restricted to convex-hull
/// vertices. The farthest pair of a point set always lies on its hull.
pub(crate) fn diameter_pair_hull(points: &[Point]) -> (usize, usize) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i].x.total_cmp(&points[j].x).then(points[i].y.total_cmp(&points[j].y)).then(i.cmp(&j))
    });
    order.dedup_by(|b, a| points[*a] == points[*b]);
    if order.len() < 3 {
        return best_pair(points, order);
    }
    let cross = |o: usize, a: usize, b: usize| points[a].sub(points[o]).cross(points[b].sub(points[o]));
    let mut hull: Vec<usize> = Vec::with_capacity(order.len() * 2);
    for &i in &order {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    best_pair(points, hull)
}

/// Simplifies a closed ring.
///
/// The ring is cut at its two mutually farthest vertices into two open
/// chains, each simplified independently. If fewer than three vertices
/// survive the tolerance is halved and the ring simplified again.
pub fn simplify_ring(ring: &Ring, cfg: &SimplifyConfig) -> SimplifyResult {
    let pts = ring.vertices();
    let n = pts.len();
    let (a, b) = diameter_pair(pts);
    let first: Vec<Point> = pts[a..=b].to_vec();
    let second: Vec<Point> = pts[b..].iter().chain(pts[..=a].iter()).copied().collect();

    let mut epsilon = cfg.epsilon;
    for _ in 0..256 {
        let mut retained: Vec<usize> = dp_points(&first, epsilon).into_iter().map(|k| a + k).collect();
        retained.extend(dp_points(&second, epsilon).into_iter().map(|k| (b + k) % n));
        retained.sort_unstable();
        retained.dedup();
        if retained.len() >= 3 {
            let runs = ring_runs(&retained, n);
            return SimplifyResult { retained, runs, epsilon_used: epsilon };
        }
        log::debug!("ring simplification kept {} vertices at eps {epsilon}, halving", retained.len());
        epsilon *= 0.5;
    }
    let retained: Vec<usize> = (0..n).collect();
    let runs = ring_runs(&retained, n);
    SimplifyResult { retained, runs, epsilon_used: epsilon }
}
