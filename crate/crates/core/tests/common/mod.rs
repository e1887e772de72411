#![allow(dead_code)]

use footprint_core::geometry::{Point, Polyline, Ring};
use footprint_core::synth::{generate, Shape, SynthCase, TraceMode};
use footprint_core::SynthSpec;
use rand::Rng;

/// Random walk with turning steps, lengths 0.2..3 m.
pub fn random_walk<R: Rng>(rng: &mut R, n: usize) -> Polyline {
    let mut p = Point::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
    let mut heading: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut pts = Vec::with_capacity(n);
    pts.push(p);
    while pts.len() < n {
        heading += rng.gen_range(-0.8..0.8);
        let step = rng.gen_range(0.2..3.0);
        p = Point::new(p.x + step * heading.cos(), p.y + step * heading.sin());
        pts.push(p);
    }
    Polyline::new(pts).unwrap()
}

/// A 100-vertex wall: straight pieces through V1, V47, V60, V75, V100
/// (1-based) with ±0.1 m jitter between them. V47 sits 1.8 m off the
/// V1-V100 chord and is the unique farthest vertex.
pub fn narrated_wall() -> Polyline {
    let anchors = [(0.0, 0.0), (46.0, 1.8), (59.0, 0.4), (74.0, 1.2), (99.0, 0.0)];
    let truth = |x: f64| {
        for w in anchors.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x <= x1 {
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        unreachable!()
    };
    let pts = (0..100)
        .map(|k| {
            let x = k as f64;
            let jitter = if [0, 46, 59, 74, 99].contains(&k) { 0.0 } else { 0.1 * (2.3 * x).sin() };
            Point::new(x, truth(x) + jitter)
        })
        .collect();
    Polyline::new(pts).unwrap()
}

pub fn rect(w: f64, h: f64) -> Ring {
    Ring::new(vec![Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)]).unwrap()
}

/// Rasterized L-shape with burrs, as used by the reconstruction checks.
pub fn lshape(seed: u64, rotation: f64, burrs: usize) -> (SynthSpec, SynthCase) {
    let spec = SynthSpec { shape: Shape::LShape, rotation, burr_count: burrs, seed, ..SynthSpec::default() };
    let case = generate(&spec).unwrap();
    (spec, case)
}

/// Densified outline with burrs whose ground truth is easy to audit.
pub fn densified(shape: Shape, seed: u64, burrs: usize, amplitude: f64) -> (SynthSpec, SynthCase) {
    let spec = SynthSpec {
        shape,
        rotation: (seed % 90) as f64,
        burr_count: burrs,
        burr_amplitude: amplitude,
        seed,
        scale: 1.5,
        trace: TraceMode::Densify { spacing: 0.5 },
        ..SynthSpec::default()
    };
    let case = generate(&spec).unwrap();
    (spec, case)
}

/// Largest distance from a clean corner to its nearest output vertex.
pub fn max_corner_error(clean: &Ring, out: &Ring) -> f64 {
    clean
        .vertices()
        .iter()
        .map(|c| out.vertices().iter().map(|p| p.distance(*c)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}
