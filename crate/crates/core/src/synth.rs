//! Synthetic footprints with known ground truth.
//!
//! A case starts from an ideal polygon, degrades it the way a raster
//! extraction would (pixel staircase along oblique walls, small burrs),
//! and keeps both versions so every later stage can be scored exactly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Sub};
use thiserror::Error;

use crate::geometry::{turn_sign, GeometryError, Orientation, Point, Ring, Turn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("shape extent {extent:.3} m is below 4 pixels of {gsd} m")]
    ShapeTooSmall { extent: f64, gsd: f64 },
    #[error("cannot place {requested} burrs (at most {available})")]
    TooManyBurrs { requested: usize, available: usize },
    #[error("affine map is singular (det = {0:e})")]
    SingularTransform(f64),
    #[error("projective map sends a vertex behind the horizon (w = {0})")]
    HorizonCrossing(f64),
    #[error("invalid synthesis parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Rectangle,
    LShape,
    Pentagon,
    /// Rectilinear "skyline" polygon with the given (even, ≥ 4) corner count.
    RandomOrthogonal {
        corners: usize,
    },
}

/// How the clean outline is degraded before burrs are added.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// Rasterize at `gsd` and trace the pixel boundary.
    Staircase,
    /// Keep the exact outline, subdivided so no edge exceeds `spacing` m.
    Densify { spacing: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub shape: Shape,
    /// Meters per pixel.
    pub gsd: f64,
    /// Degrees, counter-clockwise.
    pub rotation: f64,
    pub burr_count: usize,
    pub burr_amplitude: f64,
    pub burr_base: f64,
    pub seed: u64,
    /// Uniform scale applied to the base shape.
    pub scale: f64,
    pub trace: TraceMode,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            shape: Shape::Rectangle,
            gsd: 0.25,
            rotation: 0.0,
            burr_count: 0,
            burr_amplitude: 0.3,
            burr_base: 0.15,
            seed: 0,
            scale: 1.0,
            trace: TraceMode::Staircase,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidParameter(m.to_string()));
        if !(self.gsd > 0.0 && self.gsd.is_finite()) {
            return bad("gsd must be positive");
        }
        if !(self.burr_amplitude > 0.0 && self.burr_amplitude.is_finite()) {
            return bad("burr amplitude must be positive");
        }
        if !(self.burr_base > 0.0 && self.burr_base.is_finite()) {
            return bad("burr base must be positive");
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad("scale must be positive");
        }
        if !self.rotation.is_finite() {
            return bad("rotation must be finite");
        }
        if let Shape::RandomOrthogonal { corners } = self.shape {
            if corners < 4 || corners % 2 != 0 {
                return bad("orthogonal shapes need an even corner count of at least 4");
            }
        }
        if let TraceMode::Densify { spacing } = self.trace {
            if !(spacing > 0.0 && spacing.is_finite()) {
                return bad("densify spacing must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthCase {
    pub clean: Ring,
    pub noisy: Ring,
    /// Indices of burr apexes in `noisy`.
    pub burr_indices: Vec<usize>,
    pub true_corner_count: usize,
}

/// Counter-clockwise base outline, roughly centered on the origin.
fn base_outline(shape: Shape, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let p = Point::new;
    match shape {
        Shape::Rectangle => {
            let w = rng.gen_range(8.0..30.0);
            let h = rng.gen_range(6.0..20.0);
            vec![p(0.0, 0.0), p(w, 0.0), p(w, h), p(0.0, h)]
        }
        Shape::LShape => {
            let w = rng.gen_range(14.0..30.0);
            let h = rng.gen_range(12.0..24.0);
            let nw = w * rng.gen_range(0.3..0.6);
            let nh = h * rng.gen_range(0.3..0.6);
            vec![p(0.0, 0.0), p(w, 0.0), p(w, h - nh), p(w - nw, h - nh), p(w - nw, h), p(0.0, h)]
        }
        Shape::Pentagon => {
            let r = rng.gen_range(6.0..15.0);
            (0..5)
                .map(|k| {
                    let t = (90.0 + 72.0 * k as f64).to_radians();
                    p(r * t.cos(), r * t.sin())
                })
                .collect()
        }
        Shape::RandomOrthogonal { corners } => {
            let columns = (corners - 2) / 2;
            let mut heights: Vec<f64> = Vec::with_capacity(columns);
            for _ in 0..columns {
                let mut h = rng.gen_range(5.0..20.0);
                while heights.last().is_some_and(|&last: &f64| (last - h).abs() < 2.0) {
                    h = rng.gen_range(5.0..20.0);
                }
                heights.push(h);
            }
            let mut xs = vec![0.0];
            for _ in 0..columns {
                let x = xs.last().unwrap() + rng.gen_range(3.0..8.0);
                xs.push(x);
            }
            let width = xs[columns];
            let mut out = vec![p(0.0, 0.0), p(width, 0.0)];
            for c in (0..columns).rev() {
                out.push(p(xs[c + 1], heights[c]));
                out.push(p(xs[c], heights[c]));
            }
            out
        }
    }
}

/// Clean ground-truth ring for `spec`: base shape scaled, rotated and
/// placed at a seeded sub-pixel offset.
pub fn clean_ring(spec: &SynthSpec) -> Result<Ring, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let outline = base_outline(spec.shape, &mut rng);
    let n = outline.len() as f64;
    let centre = outline.iter().fold(Point::default(), |a, &b| a.add(b)).scale(1.0 / n);
    let offset = Point::new(100.0 + rng.gen_range(0.0..spec.gsd), 100.0 + rng.gen_range(0.0..spec.gsd));
    let pts = outline.into_iter().map(|q| q.sub(centre).scale(spec.scale).rotated(spec.rotation).add(offset)).collect();
    Ok(Ring::new(pts)?)
}

/// Subdivides every edge into equal pieces no longer than `spacing`.
pub fn densify(ring: &Ring, spacing: f64) -> Ring {
    let mut out = Vec::new();
    for (a, b) in ring.edges() {
        let pieces = (a.distance(b) / spacing).ceil().max(1.0) as usize;
        for k in 0..pieces {
            out.push(a.lerp(b, k as f64 / pieces as f64));
        }
    }
    Ring::new(out).expect("subdividing edges keeps a valid ring")
}

/// Generates one case: clean outline, degraded outline, burrs.
pub fn generate(spec: &SynthSpec) -> Result<SynthCase, SynthError> {
    let clean = clean_ring(spec)?;
    let traced = match spec.trace {
        TraceMode::Staircase => staircase_trace(&clean, spec.gsd, spec.seed)?,
        TraceMode::Densify { spacing } => densify(&clean, spacing),
    };
    let burrs = BurrSpec { count: spec.burr_count, amplitude: spec.burr_amplitude, base: spec.burr_base };
    let (noisy, burr_indices) =
        inject_burrs_avoiding(&traced, &burrs, spec.seed ^ 0x9E37_79B9_7F4A_7C15, clean.vertices())?;
    Ok(SynthCase { true_corner_count: clean.len(), clean, noisy, burr_indices })
}

/// `count` cases from one template. Per-case seeds are drawn from `seed`;
/// with `random_rotation` each rotation is drawn from [0°, 90°) too.
pub fn corpus(
    template: &SynthSpec,
    count: usize,
    seed: u64,
    random_rotation: bool,
) -> Result<Vec<(SynthSpec, SynthCase)>, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut spec = *template;
            spec.seed = rng.gen();
            if random_rotation {
                spec.rotation = rng.gen_range(0.0..90.0);
            }
            generate(&spec).map(|case| (spec, case))
        })
        .collect()
}

/// Seeded tie-break for pixel centers lying exactly on the boundary.
fn tie_break(seed: u64, i: i64, j: i64) -> bool {
    let mut h = seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (j as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    h ^= h >> 33;
    h = h.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    h ^= h >> 33;
    h & 1 == 1
}

struct Raster {
    i0: i64,
    j0: i64,
    width: i64,
    height: i64,
    cells: Vec<bool>,
}

impl Raster {
    fn filled(&self, i: i64, j: i64) -> bool {
        let (x, y) = (i - self.i0, j - self.j0);
        x >= 0 && y >= 0 && x < self.width && y < self.height && self.cells[(y * self.width + x) as usize]
    }
}

/// Pixel cells whose centers fall inside `ring`, on an axis-aligned grid of
/// pitch `gsd` anchored at the origin.
fn rasterize(ring: &Ring, gsd: f64, seed: u64) -> Raster {
    let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
    for p in ring.vertices() {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let i0 = (lo.x / gsd).floor() as i64 - 1;
    let j0 = (lo.y / gsd).floor() as i64 - 1;
    let width = (hi.x / gsd).ceil() as i64 + 1 - i0;
    let height = (hi.y / gsd).ceil() as i64 + 1 - j0;
    let mut cells = vec![false; (width * height) as usize];
    let mut xs = Vec::new();
    for row in 0..height {
        let j = j0 + row;
        let y = (j as f64 + 0.5) * gsd;
        xs.clear();
        for (a, b) in ring.edges() {
            if (a.y > y) != (b.y > y) {
                xs.push(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
            }
        }
        xs.sort_by(f64::total_cmp);
        for span in xs.chunks_exact(2) {
            let (x0, x1) = (span[0], span[1]);
            let first = (x0 / gsd - 0.5).floor() as i64;
            let last = (x1 / gsd - 0.5).ceil() as i64;
            for i in first..=last {
                let cx = (i as f64 + 0.5) * gsd;
                let inside = if cx > x0 && cx < x1 {
                    true
                } else if cx == x0 || cx == x1 {
                    tie_break(seed, i, j)
                } else {
                    false
                };
                if inside {
                    cells[(row * width + (i - i0)) as usize] = true;
                }
            }
        }
    }
    Raster { i0, j0, width, height, cells }
}

/// Traces the pixel boundary of the 4-connected component holding the
/// lowest-leftmost filled cell. Returns grid-corner coordinates of every
/// unit step, counter-clockwise.
fn trace_cells(raster: &Raster) -> Option<Vec<(i64, i64)>> {
    let start = (0..raster.height)
        .flat_map(|y| (0..raster.width).map(move |x| (x, y)))
        .find(|&(x, y)| raster.cells[(y * raster.width + x) as usize])
        .map(|(x, y)| (x + raster.i0, y + raster.j0))?;
    let half = |k: i64| k.div_euclid(2);
    let mut p = start;
    let mut d = (1i64, 0i64);
    let mut out = vec![start];
    loop {
        p = (p.0 + d.0, p.1 + d.1);
        let l = (-d.1, d.0);
        let ahead_left = raster.filled(p.0 + half(d.0 + l.0), p.1 + half(d.1 + l.1));
        let ahead_right = raster.filled(p.0 + half(d.0 - l.0), p.1 + half(d.1 - l.1));
        d = match (ahead_left, ahead_right) {
            (true, true) => (d.1, -d.0),
            (true, false) => d,
            (false, _) => l,
        };
        if p == start && d == (1, 0) {
            break;
        }
        out.push(p);
    }
    Some(out)
}

/// Rasterizes `clean` at `gsd` and follows the resulting pixel boundary.
///
/// Every unit pixel edge contributes a vertex, so straight runs of the
/// staircase are left unmerged (see [`Ring::merge_collinear`]). `seed`
/// only decides pixels whose center lies exactly on the outline.
pub fn staircase_trace(clean: &Ring, gsd: f64, seed: u64) -> Result<Ring, SynthError> {
    if !(gsd > 0.0 && gsd.is_finite()) {
        return Err(SynthError::InvalidParameter("gsd must be positive".into()));
    }
    let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
    for p in clean.vertices() {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let extent = (hi.x - lo.x).min(hi.y - lo.y);
    if extent < 4.0 * gsd {
        return Err(SynthError::ShapeTooSmall { extent, gsd });
    }
    let raster = rasterize(clean, gsd, seed);
    let steps = trace_cells(&raster).ok_or(SynthError::ShapeTooSmall { extent, gsd })?;
    let ring = Ring::new(steps.into_iter().map(|(i, j)| Point::new(i as f64 * gsd, j as f64 * gsd)).collect())?;
    Ok(ring.with_orientation(clean.orientation()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurrSpec {
    pub count: usize,
    /// Apex height above (or below) the edge, meters.
    pub amplitude: f64,
    /// Width of the burr where it meets the edge, meters.
    pub base: f64,
}

/// Inserts triangular burrs, treating every turning vertex as a corner
/// to keep clear of.
pub fn inject_burrs(ring: &Ring, burrs: &BurrSpec, seed: u64) -> Result<(Ring, Vec<usize>), SynthError> {
    let n = ring.len();
    let corners: Vec<Point> = (0..n)
        .filter(|&i| {
            let (p, v, q) = ring.neighborhood(i);
            turn_sign(p, v, q) != Turn::Straight
        })
        .map(|i| ring.vertex(i))
        .collect();
    inject_burrs_avoiding(ring, burrs, seed, &corners)
}

/// Inserts `burrs.count` triangular burrs, each centered on its own edge.
///
/// Burrs alternate outward and inward along the ring. An edge is eligible
/// when it is at least 1.2 × base long, does not end at a protected
/// corner, and both burr base points stay at least 2 × base from every
/// protected corner. No two burrs share or sit on adjacent edges.
pub fn inject_burrs_avoiding(
    ring: &Ring,
    burrs: &BurrSpec,
    seed: u64,
    protected: &[Point],
) -> Result<(Ring, Vec<usize>), SynthError> {
    let n = ring.len();
    if burrs.count == 0 {
        return Ok((ring.clone(), Vec::new()));
    }
    if !(burrs.amplitude > 0.0 && burrs.base > 0.0) {
        return Err(SynthError::InvalidParameter("burr amplitude and base must be positive".into()));
    }
    if burrs.count > n / 4 {
        return Err(SynthError::TooManyBurrs { requested: burrs.count, available: n / 4 });
    }
    let near_protected = |p: Point, r: f64| protected.iter().any(|c| c.distance(p) < r);
    let mut eligible: Vec<usize> = (0..n)
        .filter(|&e| {
            let (a, b) = (ring.vertex(e), ring.vertex(e + 1));
            let len = a.distance(b);
            let mid = a.midpoint(b);
            len >= 1.2 * burrs.base
                && !near_protected(a, 1e-9)
                && !near_protected(b, 1e-9)
                && !near_protected(mid, 2.5 * burrs.base)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    eligible.shuffle(&mut rng);
    let mut taken = vec![false; n];
    let mut chosen = Vec::with_capacity(burrs.count);
    for e in eligible {
        if chosen.len() == burrs.count {
            break;
        }
        if taken[e] || taken[(e + 1) % n] || taken[(e + n - 1) % n] {
            continue;
        }
        taken[e] = true;
        chosen.push(e);
    }
    if chosen.len() < burrs.count {
        return Err(SynthError::TooManyBurrs { requested: burrs.count, available: chosen.len() });
    }
    chosen.sort_unstable();

    // Outward is to the right of travel on a CCW ring.
    let outward_sign = match ring.orientation() {
        Orientation::Ccw => 1.0,
        Orientation::Cw => -1.0,
    };
    let mut out = Vec::with_capacity(n + 3 * burrs.count);
    let mut apexes = Vec::with_capacity(burrs.count);
    let mut next = chosen.iter().copied().enumerate().peekable();
    for i in 0..n {
        out.push(ring.vertex(i));
        if let Some(&(k, _)) = next.peek().filter(|&&(_, e)| e == i) {
            next.next();
            let (a, b) = (ring.vertex(i), ring.vertex(i + 1));
            let len = a.distance(b);
            let dir = b.sub(a).scale(1.0 / len);
            let right = Point::new(dir.y, -dir.x);
            let side = if k % 2 == 0 { outward_sign } else { -outward_sign };
            let mid = a.midpoint(b);
            let half = 0.5 * burrs.base;
            out.push(mid.sub(dir.scale(half)));
            apexes.push(out.len());
            out.push(mid.add(right.scale(side * burrs.amplitude)));
            out.push(mid.add(dir.scale(half)));
        }
    }
    Ok((Ring::new(out)?, apexes))
}

/// Rotation, flip, uniform scale, shear and translation, applied as
/// `translate ∘ rotate ∘ scale ∘ shear ∘ flip`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub rotation: f64,
    pub scale: f64,
    /// x += shear · y
    pub shear: f64,
    /// Mirror across the x-axis first.
    pub flip: bool,
    pub tx: f64,
    pub ty: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Self { rotation: 0.0, scale: 1.0, shear: 0.0, flip: false, tx: 0.0, ty: 0.0 }
    }
}

/// Row-major 2×3 affine matrix `[a b tx; c d ty]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMatrix(pub [f64; 6]);

impl AffineMatrix {
    pub fn determinant(&self) -> f64 {
        let [a, b, _, c, d, _] = self.0;
        a * d - b * c
    }

    pub fn apply(&self, p: Point) -> Point {
        let [a, b, tx, c, d, ty] = self.0;
        Point::new(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty)
    }

    pub fn inverse(&self) -> Result<AffineMatrix, SynthError> {
        let det = self.determinant();
        if det.abs() < 1e-12 {
            return Err(SynthError::SingularTransform(det));
        }
        let [a, b, tx, c, d, ty] = self.0;
        let (ia, ib, ic, id) = (d / det, -b / det, -c / det, a / det);
        Ok(AffineMatrix([ia, ib, -(ia * tx + ib * ty), ic, id, -(ic * tx + id * ty)]))
    }

    pub fn apply_ring(&self, ring: &Ring) -> Result<Ring, SynthError> {
        if self.determinant().abs() < 1e-12 {
            return Err(SynthError::SingularTransform(self.determinant()));
        }
        Ok(Ring::new(ring.vertices().iter().map(|&p| self.apply(p)).collect())?)
    }
}

impl Affine {
    pub fn matrix(&self) -> AffineMatrix {
        let (s, c) = self.rotation.to_radians().sin_cos();
        let f = if self.flip { -1.0 } else { 1.0 };
        // rotate · scale · shear · flip
        let (m00, m01, m10, m11) = (self.scale, self.scale * self.shear * f, 0.0, self.scale * f);
        AffineMatrix([c * m00 - s * m10, c * m01 - s * m11, self.tx, s * m00 + c * m10, s * m01 + c * m11, self.ty])
    }
}

/// Applies `t` to every vertex. Orientation flips iff the determinant is
/// negative.
pub fn apply_affine(ring: &Ring, t: &Affine) -> Result<Ring, SynthError> {
    if !(t.scale > 0.0 && t.scale.is_finite()) {
        return Err(SynthError::InvalidParameter("scale must be positive".into()));
    }
    if t.shear.abs() >= 1.0 {
        return Err(SynthError::InvalidParameter("|shear| must be below 1".into()));
    }
    t.matrix().apply_ring(ring)
}

/// Homography `I + P` whose only non-zero perturbation is the projective
/// row `(g, h)`, acting on coordinates relative to `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perspective {
    pub g: f64,
    pub h: f64,
    pub origin: Point,
}

impl Perspective {
    pub fn w(&self, p: Point) -> f64 {
        1.0 + self.g * (p.x - self.origin.x) + self.h * (p.y - self.origin.y)
    }

    pub fn apply(&self, p: Point) -> Result<Point, SynthError> {
        let w = self.w(p);
        if w <= 0.0 {
            return Err(SynthError::HorizonCrossing(w));
        }
        Ok(self.origin.add(p.sub(self.origin).scale(1.0 / w)))
    }
}

/// Seeded perspective tilt of strength `strength` (per meter), about the
/// ring's vertex centroid.
pub fn perspective_for(ring: &Ring, strength: f64, seed: u64) -> Result<Perspective, SynthError> {
    if !(0.0..=0.01).contains(&strength) {
        return Err(SynthError::InvalidParameter("perspective strength must lie in [0, 0.01]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (g, h) = if strength > 0.0 {
        (rng.gen_range(-strength..=strength), rng.gen_range(-strength..=strength))
    } else {
        (0.0, 0.0)
    };
    let n = ring.len() as f64;
    let origin = ring.vertices().iter().fold(Point::default(), |a, &b| a.add(b)).scale(1.0 / n);
    Ok(Perspective { g, h, origin })
}

pub fn apply_perspective_perturbation(ring: &Ring, strength: f64, seed: u64) -> Result<Ring, SynthError> {
    let h = perspective_for(ring, strength, seed)?;
    if strength == 0.0 {
        return Ok(ring.clone());
    }
    let pts = ring.vertices().iter().map(|&p| h.apply(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(Ring::new(pts)?)
}
