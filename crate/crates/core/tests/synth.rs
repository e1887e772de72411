use footprint_core::geometry::{distance_to_boundary, signed_area, Point};
use footprint_core::synth::{
    apply_affine, apply_perspective_perturbation, corpus, generate, inject_burrs, perspective_for, staircase_trace,
    Affine, BurrSpec, Shape, TraceMode,
};
use footprint_core::{remove_spikes, Orientation, Ring, SpikeConfig, SynthSpec};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Rectangle),
        Just(Shape::LShape),
        Just(Shape::Pentagon),
        (2usize..6).prop_map(|k| Shape::RandomOrthogonal { corners: 2 * k }),
    ]
}

fn spec() -> impl Strategy<Value = SynthSpec> {
    (shape(), 0.0..90.0f64, 0usize..6, 0.05..0.49f64, any::<u64>(), prop::bool::ANY).prop_map(
        |(shape, rotation, burr_count, burr_amplitude, seed, dense)| SynthSpec {
            shape,
            rotation,
            burr_count,
            burr_amplitude,
            seed,
            scale: if dense { 1.5 } else { 1.0 },
            trace: if dense { TraceMode::Densify { spacing: 0.5 } } else { TraceMode::Staircase },
            ..SynthSpec::default()
        },
    )
}

fn square(side: f64) -> Ring {
    Ring::new(vec![Point::new(0.0, 0.0), Point::new(side, 0.0), Point::new(side, side), Point::new(0.0, side)]).unwrap()
}

fn on_grid(v: f64, gsd: f64) -> bool {
    let k = v / gsd;
    (k - k.round()).abs() < 1e-9 * k.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_seed_determines_case(s in spec()) {
        prop_assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
    }

    #[test]
    fn prop_case_invariants(s in spec()) {
        let case = generate(&s).unwrap();
        prop_assert_eq!(case.true_corner_count, case.clean.len());
        prop_assert_eq!(case.burr_indices.len(), s.burr_count);
        prop_assert!(case.burr_indices.iter().all(|&i| i < case.noisy.len()));
        prop_assert_eq!(case.noisy.orientation(), Orientation::Ccw);
        for c in case.clean.vertices() {
            prop_assert!(distance_to_boundary(*c, &case.noisy) <= s.gsd);
        }
    }

    #[test]
    fn prop_staircase_on_grid(s in spec()) {
        let clean = footprint_core::synth::clean_ring(&s).unwrap();
        let t = staircase_trace(&clean, s.gsd, s.seed).unwrap();
        for v in t.vertices() {
            prop_assert!(on_grid(v.x, s.gsd) && on_grid(v.y, s.gsd), "{v:?}");
            prop_assert!(distance_to_boundary(*v, &clean) <= s.gsd * std::f64::consts::SQRT_2 + 1e-9);
        }
        for (a, b) in t.edges() {
            prop_assert!(a.x == b.x || a.y == b.y);
        }
    }

    #[test]
    fn prop_burr_area_bookkeeping(w in 8.0..30.0f64, h in 6.0..20.0f64, count in 1usize..12, amp in 0.05..0.5f64, base in 0.05..0.3f64, seed in any::<u64>()) {
        let ring = footprint_core::synth::densify(
            &Ring::new(vec![Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)]).unwrap(),
            0.5,
        );
        let (out, apexes) = inject_burrs(&ring, &BurrSpec { count, amplitude: amp, base }, seed).unwrap();
        // Burrs alternate outward (+) and inward (-) along the ring.
        let expected: f64 = (0..count).map(|k| if k % 2 == 0 { 0.5 * base * amp } else { -0.5 * base * amp }).sum();
        prop_assert!((signed_area(&out) - signed_area(&ring) - expected).abs() < 1e-9);
        prop_assert_eq!(apexes.len(), count);
    }

    #[test]
    fn prop_default_base_burrs_are_always_removed(s in spec()) {
        let s = SynthSpec { trace: TraceMode::Densify { spacing: 0.5 }, scale: 1.5, ..s };
        let case = generate(&s).unwrap();
        let out = remove_spikes(&case.noisy, &SpikeConfig::default()).unwrap();
        let mut removed = out.removed.clone();
        removed.sort_unstable();
        prop_assert_eq!(removed, case.burr_indices);
    }

    #[test]
    fn prop_affine_inverse_round_trip(
        rotation in -180.0..180.0f64, scale in 0.2..5.0f64, shear in -0.9..0.9f64,
        flip in prop::bool::ANY, tx in -1e3..1e3f64, ty in -1e3..1e3f64,
    ) {
        let t = Affine { rotation, scale, shear, flip, tx, ty };
        let ring = square(10.0);
        let out = apply_affine(&ring, &t).unwrap();
        let m = t.matrix();
        prop_assert_eq!(out.orientation() != ring.orientation(), m.determinant() < 0.0);
        let inv = m.inverse().unwrap();
        for (p, q) in ring.vertices().iter().zip(out.vertices()) {
            prop_assert!(inv.apply(*q).distance(*p) < 1e-9);
        }
    }
}

#[test]
fn corpus_is_reproducible() {
    let template = SynthSpec { burr_count: 3, ..SynthSpec::default() };
    let a = corpus(&template, 10, 99, true).unwrap();
    let b = corpus(&template, 10, 99, true).unwrap();
    assert_eq!(a, b);
    let c = corpus(&template, 10, 100, true).unwrap();
    assert_ne!(a, c);
    assert!(a.iter().all(|(s, _)| (0.0..90.0).contains(&s.rotation)));
}

#[test]
fn perspective_on_ten_meter_square() {
    let sq = square(10.0);
    for seed in 0..20 {
        let h = perspective_for(&sq, 0.001, seed).unwrap();
        let out = apply_perspective_perturbation(&sq, 0.001, seed).unwrap();
        for (p, q) in sq.vertices().iter().zip(out.vertices()) {
            // Direct evaluation of the homography.
            let w = 1.0 + h.g * (p.x - h.origin.x) + h.h * (p.y - h.origin.y);
            let expect = Point::new(h.origin.x + (p.x - h.origin.x) / w, h.origin.y + (p.y - h.origin.y) / w);
            assert!(q.distance(expect) < 1e-12);
            assert!(q.distance(*p) <= 0.1);
        }
        let dir = |a: Point, b: Point| (b.y - a.y).atan2(b.x - a.x);
        let v = out.vertices();
        let bottom = dir(v[0], v[1]);
        let top = dir(v[3], v[2]);
        assert!((bottom - top).abs() > 0.0);
    }
    assert_eq!(apply_perspective_perturbation(&sq, 0.0, 5).unwrap(), sq);
}
