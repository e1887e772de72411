//! Planar primitives and predicates shared by every stage.
//!
//! Coordinates are metric (meters in a projected CRS). Nothing here
//! reprojects or handles geodesic distances.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coincidence tolerance for predicates, in meters (or square meters for
/// cross products).
pub const COINCIDENCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("chord endpoints coincide")]
    DegenerateChord,
    #[error("vertex coincides with a neighbor, angle is undefined")]
    DegenerateAngle,
    #[error("lines are nearly parallel (|sin| = {sin:.3e})")]
    NearParallel { sin: f64 },
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("need at least {min} vertices, got {got}")]
    TooFewVertices { min: usize, got: usize },
    #[error("consecutive vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("ring has zero area")]
    ZeroArea,
    #[error("line coefficients (a, b) are both zero")]
    DegenerateLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2-D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    /// Rotates about the origin by `deg` degrees counter-clockwise.
    pub fn rotated(self, deg: f64) -> Point {
        let (s, c) = deg.to_radians().sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn coincides(self, o: Point) -> bool {
        self.distance(o) < COINCIDENCE_EPS
    }
}

impl Add for Point {
    type Output = Point;

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// An open chain of at least two vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices { min: 2, got: vertices.len() });
        }
        check_finite(&vertices)?;
        for (i, w) in vertices.windows(2).enumerate() {
            if w[0].coincides(w[1]) {
                return Err(GeometryError::DuplicateVertex(i, i + 1));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "ccw")]
    Ccw,
    #[serde(rename = "cw")]
    Cw,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }

    /// The turn a convex vertex makes on a ring with this orientation.
    pub fn convex_turn(self) -> Turn {
        match self {
            Orientation::Ccw => Turn::Left,
            Orientation::Cw => Turn::Right,
        }
    }
}

/// A closed polygon boundary. The closing edge from the last vertex back
/// to the first is implied and the first vertex is never repeated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ring {
    vertices: Vec<Point>,
    orientation: Orientation,
}

impl Ring {
    /// Validates and wraps `vertices`. Consecutive (cyclic) duplicates
    /// and zero-area input are rejected.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices { min: 3, got: vertices.len() });
        }
        check_finite(&vertices)?;
        let n = vertices.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i].coincides(vertices[j]) {
                return Err(GeometryError::DuplicateVertex(i, j));
            }
        }
        let area = shoelace(&vertices);
        if area == 0.0 || !area.is_finite() {
            return Err(GeometryError::ZeroArea);
        }
        let orientation = if area > 0.0 { Orientation::Ccw } else { Orientation::Cw };
        Ok(Self { vertices, orientation })
    }

    /// Builds a ring from raw input, dropping an explicit closing vertex
    /// and collapsing consecutive duplicates first.
    pub fn from_raw(mut vertices: Vec<Point>) -> Result<Self, GeometryError> {
        check_finite(&vertices)?;
        vertices.dedup_by(|b, a| a.coincides(*b));
        while vertices.len() > 1 && vertices[0].coincides(vertices[vertices.len() - 1]) {
            vertices.pop();
        }
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.vertices.len()]
    }

    /// Cyclic (prev, v, next) around index `i`.
    pub fn neighborhood(&self, i: usize) -> (Point, Point, Point) {
        let n = self.vertices.len();
        (self.vertices[(i + n - 1) % n], self.vertices[i], self.vertices[(i + 1) % n])
    }

    /// Same boundary traversed the other way round.
    pub fn reversed(&self) -> Ring {
        let mut v = self.vertices.clone();
        v.reverse();
        Ring { vertices: v, orientation: self.orientation.reversed() }
    }

    /// Returns this ring with the requested orientation.
    pub fn with_orientation(&self, o: Orientation) -> Ring {
        if self.orientation == o {
            self.clone()
        } else {
            self.reversed()
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    /// True if no two non-adjacent edges touch or cross.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 4 {
            return true;
        }
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Drops vertices whose turn is [`Turn::Straight`].
    pub fn merge_collinear(&self) -> Ring {
        let n = self.vertices.len();
        let kept: Vec<Point> = (0..n)
            .filter(|&i| {
                let (p, v, q) = self.neighborhood(i);
                turn_sign(p, v, q) != Turn::Straight
            })
            .map(|i| self.vertices[i])
            .collect();
        Ring::new(kept).unwrap_or_else(|_| self.clone())
    }
}

fn check_finite(vertices: &[Point]) -> Result<(), GeometryError> {
    if vertices.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(GeometryError::NonFinite)
    }
}

fn shoelace(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice
}

/// Shoelace area; positive for counter-clockwise rings.
pub fn signed_area(ring: &Ring) -> f64 {
    shoelace(&ring.vertices)
}

/// Distance from `p` to the infinite line through the chord endpoints.
pub fn perpendicular_distance(p: Point, chord_start: Point, chord_end: Point) -> Result<f64, GeometryError> {
    let d = chord_end.sub(chord_start);
    let len = d.norm();
    if len < COINCIDENCE_EPS {
        return Err(GeometryError::DegenerateChord);
    }
    Ok(d.cross(p.sub(chord_start)).abs() / len)
}

/// Interior angle at `v` between the rays toward `prev` and `next`, in
/// degrees within [0, 180].
pub fn vertex_angle(prev: Point, v: Point, next: Point) -> Result<f64, GeometryError> {
    let a = prev.sub(v);
    let b = next.sub(v);
    if a.norm() < COINCIDENCE_EPS || b.norm() < COINCIDENCE_EPS {
        return Err(GeometryError::DegenerateAngle);
    }
    Ok(a.cross(b).abs().atan2(a.dot(b)).to_degrees())
}

pub fn triangle_area(p1: Point, p2: Point, p3: Point) -> f64 {
    0.5 * p2.sub(p1).cross(p3.sub(p1)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Turn {
    Left,
    Right,
    Straight,
}

impl Turn {
    /// Left against Right; `Straight` is opposite to nothing.
    pub fn is_opposite(self, other: Turn) -> bool {
        matches!((self, other), (Turn::Left, Turn::Right) | (Turn::Right, Turn::Left))
    }

    pub fn mirrored(self) -> Turn {
        match self {
            Turn::Left => Turn::Right,
            Turn::Right => Turn::Left,
            Turn::Straight => Turn::Straight,
        }
    }
}

/// Sign of (v − prev) × (next − v).
pub fn turn_sign(prev: Point, v: Point, next: Point) -> Turn {
    let z = v.sub(prev).cross(next.sub(v));
    if z.abs() < COINCIDENCE_EPS {
        Turn::Straight
    } else if z > 0.0 {
        Turn::Left
    } else {
        Turn::Right
    }
}

/// Infinite line `a·x + b·y + c = 0` with `a² + b² = 1`.
///
/// The sign is canonical: `a > 0`, or `a == 0` and `b > 0`. The normal
/// `(a, b)` points into the half-plane where the expression is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    a: f64,
    b: f64,
    c: f64,
}

impl Line {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let n = a.hypot(b);
        if n < COINCIDENCE_EPS {
            return Err(GeometryError::DegenerateLine);
        }
        let (mut a, mut b, mut c) = (a / n, b / n, c / n);
        if a < 0.0 || (a == 0.0 && b < 0.0) {
            a = -a;
            b = -b;
            c = -c;
        }
        // Avoid a stored -0.0 so equal lines compare bitwise equal.
        Ok(Self { a: a + 0.0, b: b + 0.0, c: c + 0.0 })
    }

    /// Line through two distinct points.
    pub fn through(p: Point, q: Point) -> Result<Self, GeometryError> {
        let d = q.sub(p);
        if d.norm() < COINCIDENCE_EPS {
            return Err(GeometryError::DegenerateChord);
        }
        Self::new(-d.y, d.x, d.y * p.x - d.x * p.y)
    }

    /// Line with unit normal `normal` passing through `p`.
    pub fn from_normal(normal: Point, p: Point) -> Result<Self, GeometryError> {
        Self::new(normal.x, normal.y, -(normal.x * p.x + normal.y * p.y))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn normal(&self) -> Point {
        Point::new(self.a, self.b)
    }

    /// Unit direction along the line (normal rotated by +90°).
    pub fn direction(&self) -> Point {
        Point::new(-self.b, self.a)
    }

    pub fn signed_distance(&self, p: Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    /// Direction angle in degrees, reduced to [0, 180).
    pub fn direction_deg(&self) -> f64 {
        let d = self.direction();
        let t = d.y.atan2(d.x).to_degrees();
        t.rem_euclid(180.0)
    }
}

/// Orthogonal projection of `p` onto `line`.
pub fn project_point(line: &Line, p: Point) -> Point {
    let s = line.signed_distance(p);
    Point::new(p.x - s * line.a, p.y - s * line.b)
}

/// Intersection with the default near-parallel guard of 1°.
pub fn line_intersection(l1: &Line, l2: &Line) -> Result<Point, GeometryError> {
    line_intersection_guarded(l1, l2, 1.0)
}

/// Intersection of two lines, refused when they meet at less than
/// `min_angle_deg`.
pub fn line_intersection_guarded(l1: &Line, l2: &Line, min_angle_deg: f64) -> Result<Point, GeometryError> {
    let det = l1.a * l2.b - l2.a * l1.b;
    if det.abs() < min_angle_deg.to_radians().sin() {
        return Err(GeometryError::NearParallel { sin: det.abs() });
    }
    let x = (l1.b * l2.c - l2.b * l1.c) / det;
    let y = (l2.a * l1.c - l1.a * l2.c) / det;
    Ok(Point::new(x, y))
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b.sub(a);
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (p.sub(a).dot(d) / len2).clamp(0.0, 1.0);
    p.distance(a.add(d.scale(t)))
}

/// Distance from `p` to the nearest point of the ring's boundary.
pub fn distance_to_boundary(p: Point, ring: &Ring) -> f64 {
    ring.edges().map(|(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) - COINCIDENCE_EPS
        && p.x <= a.x.max(b.x) + COINCIDENCE_EPS
        && p.y >= a.y.min(b.y) - COINCIDENCE_EPS
        && p.y <= a.y.max(b.y) + COINCIDENCE_EPS
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Even-odd point-in-polygon test.
pub fn contains_point(ring: &Ring, p: Point) -> bool {
    let mut inside = false;
    for (a, b) in ring.edges() {
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Ring {
        Ring::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn distance_axis_aligned() {
        let d = perpendicular_distance(Point::new(0.0, 1.8), Point::new(0.0, 0.0), Point::new(10.0, 0.0)).unwrap();
        assert_eq!(d, 1.8);
        let on = perpendicular_distance(Point::new(4.0, 0.0), Point::new(0.0, 0.0), Point::new(10.0, 0.0)).unwrap();
        assert_eq!(on, 0.0);
    }

    #[test]
    fn distance_rotated_chord() {
        let p = Point::new(1.0, 1.0).rotated(37.0);
        let a = Point::new(0.0, 0.0);
        let b = Point::new(2.0, 0.0).rotated(37.0);
        let d = perpendicular_distance(p, a, b).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_degenerate_chord() {
        let a = Point::new(3.0, 3.0);
        assert_eq!(perpendicular_distance(Point::new(0.0, 0.0), a, a), Err(GeometryError::DegenerateChord));
    }

    #[test]
    fn area_and_orientation() {
        let sq = unit_square();
        assert_eq!(signed_area(&sq), 1.0);
        assert_eq!(sq.orientation(), Orientation::Ccw);
        let cw = sq.reversed();
        assert_eq!(signed_area(&cw), -1.0);
        assert_eq!(cw.orientation(), Orientation::Cw);
        let tri = Ring::new(vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(0.0, 3.0)]).unwrap();
        assert_eq!(signed_area(&tri), 6.0);
    }

    #[test]
    fn ring_rejects_bad_input() {
        let collinear = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert_eq!(Ring::new(collinear), Err(GeometryError::ZeroArea));
        let dup = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert_eq!(Ring::new(dup), Err(GeometryError::DuplicateVertex(1, 2)));
        let nan = vec![Point::new(0.0, 0.0), Point::new(f64::NAN, 0.0), Point::new(0.0, 1.0)];
        assert_eq!(Ring::new(nan), Err(GeometryError::NonFinite));
        let closed = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(0.0, 0.0)];
        assert!(matches!(Ring::new(closed.clone()), Err(GeometryError::DuplicateVertex(3, 0))));
        assert_eq!(Ring::from_raw(closed).unwrap().len(), 3);
    }

    #[test]
    fn angles() {
        let o = Point::new(0.0, 0.0);
        assert!((vertex_angle(Point::new(1.0, 0.0), o, Point::new(0.0, 1.0)).unwrap() - 90.0).abs() < 1e-12);
        let wide = vertex_angle(Point::new(1.0, 0.0), o, Point::new(-1.0, 0.01)).unwrap();
        let oracle = 180.0 - 0.01f64.atan2(1.0).to_degrees();
        assert!((wide - oracle).abs() < 1e-12);
        assert!((wide - 179.427).abs() < 1e-3);
        let spike = Point::new(1.0, 0.0).rotated(15.0);
        assert!((vertex_angle(Point::new(1.0, 0.0), o, spike).unwrap() - 15.0).abs() < 1e-9);
        assert_eq!(vertex_angle(o, o, Point::new(1.0, 0.0)), Err(GeometryError::DegenerateAngle));
    }

    #[test]
    fn triangle_areas() {
        let o = Point::new(0.0, 0.0);
        assert_eq!(triangle_area(o, Point::new(1.0, 0.0), Point::new(2.0, 0.0)), 0.0);
        assert_eq!(triangle_area(o, Point::new(1.0, 0.0), Point::new(0.0, 1.0)), 0.5);
    }

    #[test]
    fn turns() {
        let o = Point::new(0.0, 0.0);
        let e = Point::new(1.0, 0.0);
        assert_eq!(turn_sign(o, e, Point::new(1.0, 1.0)), Turn::Left);
        assert_eq!(turn_sign(o, e, Point::new(1.0, -1.0)), Turn::Right);
        assert_eq!(turn_sign(o, e, Point::new(2.0, 0.0)), Turn::Straight);
    }

    #[test]
    fn projection() {
        let l = Line::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(project_point(&l, Point::new(3.0, 7.0)), Point::new(0.0, 7.0));
        assert_eq!(project_point(&l, Point::new(0.0, -2.0)), Point::new(0.0, -2.0));
    }

    #[test]
    fn intersections() {
        let x0 = Line::new(1.0, 0.0, 0.0).unwrap();
        let y0 = Line::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(line_intersection(&x0, &y0).unwrap(), Point::new(0.0, 0.0));
        let x2 = Line::new(1.0, 0.0, -2.0).unwrap();
        let y3 = Line::new(0.0, 1.0, -3.0).unwrap();
        assert_eq!(line_intersection(&x2, &y3).unwrap(), Point::new(2.0, 3.0));
        let shallow = Line::through(Point::new(0.0, 0.0), Point::new(1.0, 0.5f64.to_radians().tan())).unwrap();
        assert!(matches!(line_intersection(&y0, &shallow), Err(GeometryError::NearParallel { .. })));
    }

    #[test]
    fn line_canonical_form() {
        let l1 = Line::new(3.0, -4.0, 5.0).unwrap();
        let l2 = Line::new(-6.0, 8.0, -10.0).unwrap();
        assert_eq!(l1, l2);
        assert!((l1.a() - 0.6).abs() < 1e-15 && (l1.b() + 0.8).abs() < 1e-15 && (l1.c() - 1.0).abs() < 1e-15);
        let horiz = Line::new(0.0, -2.0, 4.0).unwrap();
        assert_eq!((horiz.a(), horiz.b(), horiz.c()), (0.0, 1.0, -2.0));
        assert_eq!(Line::new(0.0, 0.0, 1.0), Err(GeometryError::DegenerateLine));
    }

    #[test]
    fn simplicity() {
        assert!(unit_square().is_simple());
        let bowtie =
            Ring::new(vec![Point::new(0.0, 0.0), Point::new(10.0, 6.0), Point::new(10.0, 0.0), Point::new(0.0, 10.0)])
                .unwrap();
        assert!(!bowtie.is_simple());
    }

    #[test]
    fn merge_collinear_keeps_corners() {
        let r = Ring::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(r.merge_collinear().len(), 4);
    }
}
