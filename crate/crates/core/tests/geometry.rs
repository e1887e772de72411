use footprint_core::geometry::{
    contains_point, line_intersection, perpendicular_distance, project_point, signed_area, vertex_angle, Point,
};
use footprint_core::{Line, Orientation, Ring};
use proptest::prelude::*;
use std::ops::Add;

fn pt() -> impl Strategy<Value = Point> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point::new(x, y))
}

/// Closest point on `line` found by scanning along it.
fn scan_projection(line: &Line, p: Point) -> Point {
    let origin = Point::new(-line.a() * line.c(), -line.b() * line.c());
    let dir = line.direction();
    let (mut lo, mut hi) = (-1e4, 1e4);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let d1 = origin.add(dir.scale(m1)).distance(p);
        let d2 = origin.add(dir.scale(m2)).distance(p);
        if d1 < d2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    origin.add(dir.scale(0.5 * (lo + hi)))
}

fn polygon() -> impl Strategy<Value = Ring> {
    // Star-shaped around the origin with angular gaps under 180 degrees.
    prop::collection::vec((1.0..30.0f64, 0.0..1.0f64), 4..20).prop_map(|spec| {
        let n = spec.len() as f64;
        let pts = spec
            .iter()
            .enumerate()
            .map(|(k, &(r, jitter))| Point::new(r, 0.0).rotated(360.0 * (k as f64 + 0.8 * jitter) / n))
            .collect();
        Ring::new(pts).unwrap()
    })
}

proptest! {
    #[test]
    fn prop_projection_matches_scan(a in pt(), b in pt(), p in pt()) {
        prop_assume!(a.distance(b) > 1e-3);
        let line = Line::through(a, b).unwrap();
        let q = project_point(&line, p);
        prop_assert!(q.distance(scan_projection(&line, p)) < 1e-5);
        prop_assert!(line.signed_distance(q).abs() < 1e-9);
    }

    #[test]
    fn prop_distance_is_rigid(a in pt(), b in pt(), p in pt(), rot in 0.0..360.0f64, tx in -1e3..1e3f64) {
        prop_assume!(a.distance(b) > 1e-3);
        let t = |q: Point| q.rotated(rot).add(Point::new(tx, -tx));
        let d0 = perpendicular_distance(p, a, b).unwrap();
        let d1 = perpendicular_distance(t(p), t(a), t(b)).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9 * d0.max(1.0));
    }

    #[test]
    fn prop_mirror_flips_orientation(ring in polygon()) {
        let mirrored = Ring::new(ring.vertices().iter().map(|p| Point::new(-p.x, p.y)).collect()).unwrap();
        prop_assert_eq!(mirrored.orientation(), ring.orientation().reversed());
        prop_assert!((signed_area(&mirrored) + signed_area(&ring)).abs() < 1e-9 * signed_area(&ring).abs());
        prop_assert_eq!(ring.reversed().orientation(), ring.orientation().reversed());
        prop_assert_eq!(ring.with_orientation(Orientation::Cw).orientation(), Orientation::Cw);
    }

    #[test]
    fn prop_rotation_keeps_area(ring in polygon(), rot in 0.0..360.0f64) {
        let turned = Ring::new(ring.vertices().iter().map(|p| p.rotated(rot)).collect()).unwrap();
        prop_assert!((signed_area(&turned) - signed_area(&ring)).abs() < 1e-9 * signed_area(&ring).abs());
        prop_assert!(contains_point(&ring, Point::new(0.0, 0.0)));
    }

    #[test]
    fn prop_line_canonical(a in pt(), b in pt(), s in 0.1..10.0f64) {
        prop_assume!(a.distance(b) > 1e-3);
        let l1 = Line::through(a, b).unwrap();
        let l2 = Line::through(b, a).unwrap();
        let l3 = Line::new(-s * l1.a(), -s * l1.b(), -s * l1.c()).unwrap();
        for l in [l2, l3] {
            prop_assert!((l.a() - l1.a()).abs() < 1e-9 && (l.b() - l1.b()).abs() < 1e-9);
            prop_assert!((l.c() - l1.c()).abs() < 1e-9 * l1.c().abs().max(1.0));
        }
    }

    #[test]
    fn prop_intersection_on_both_lines(a in pt(), b in pt(), c in pt(), d in pt()) {
        prop_assume!(a.distance(b) > 1e-2 && c.distance(d) > 1e-2);
        let (l1, l2) = (Line::through(a, b).unwrap(), Line::through(c, d).unwrap());
        if let Ok(x) = line_intersection(&l1, &l2) {
            let scale = x.norm().max(1.0);
            prop_assert!(l1.signed_distance(x).abs() < 1e-9 * scale);
            prop_assert!(l2.signed_distance(x).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn prop_angle_is_symmetric(a in pt(), v in pt(), b in pt()) {
        prop_assume!(a.distance(v) > 1e-3 && b.distance(v) > 1e-3);
        let x = vertex_angle(a, v, b).unwrap();
        prop_assert!((0.0..=180.0).contains(&x));
        prop_assert!((x - vertex_angle(b, v, a).unwrap()).abs() < 1e-9);
    }
}
