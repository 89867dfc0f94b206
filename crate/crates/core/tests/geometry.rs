use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use hyperleaf_core::geometry::*;
use hyperleaf_core::Vec3;
use proptest::prelude::*;

fn ideal(v: Vec3) -> IdealPoint {
    IdealPoint::from_direction(v).unwrap()
}

fn equator() -> IdealCircle {
    IdealCircle::new(ideal(Vec3::Z), FRAC_PI_2).unwrap()
}

fn ball_point() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..0.95).prop_filter_map("nonzero", |(x, y, z, r)| {
        let v = Vec3::new(x, y, z);
        (v.norm() > 1e-3).then(|| v.normalized() * r)
    })
}

fn unit() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("nonzero", |(x, y, z)| {
            let v = Vec3::new(x, y, z);
            (v.norm() > 1e-2).then(|| v.normalized())
        })
}

/// Points of a leaf's carrier inside the ball.
fn carrier_points(leaf: &CanonicalLeaf, n: usize) -> Vec<Vec3> {
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < n && k < 100 * n {
        k += 1;
        let t = k as f64;
        let dir = Vec3::new((1.3 * t).sin(), (2.9 * t).cos(), (0.7 * t).sin() * (0.31 * t).cos()).normalized();
        let p = match leaf.carrier {
            Carrier::Sphere { center, radius } => center + dir * radius,
            Carrier::Plane { normal, offset } => {
                let q = dir * 0.9;
                q - normal * (q.dot(normal) - offset)
            }
        };
        if p.norm() < 0.999 {
            out.push(p);
        }
    }
    out
}

/// Mean curvature at `x` from the conformal change of the Euclidean one:
/// `H = (H_e − ∂_ν log λ)/λ`, with `ν` the co-orientation.
fn conformal_curvature(leaf: &CanonicalLeaf, x: Vec3) -> f64 {
    let nu = leaf.unit_normal(x);
    let h_e = match leaf.carrier {
        Carrier::Plane { .. } => 0.0,
        Carrier::Sphere { center, radius } => {
            // Curvature vector points to the center.
            -(x - center).dot(nu).signum() / radius
        }
    };
    let w = 1.0 - x.norm2();
    (h_e - nu.dot(x * (2.0 / w))) * w / 2.0
}

#[test]
fn conformal_factor_examples() {
    assert_eq!(conformal_factor(Vec3::ZERO).unwrap(), 2.0);
    assert!((conformal_factor(Vec3::new(0.5, 0.0, 0.0)).unwrap() - 8.0 / 3.0).abs() < 1e-15);
    assert!(conformal_factor(Vec3::new(1.0 - 1e-15, 0.0, 0.0)).is_err());
}

#[test]
fn hyp_distance_examples() {
    let p = Vec3::new(0.1, -0.2, 0.3);
    assert_eq!(hyp_distance(p, p).unwrap(), 0.0);
    let d = hyp_distance(Vec3::ZERO, Vec3::new(0.5, 0.0, 0.0)).unwrap();
    assert!((d - 3.0f64.ln()).abs() < 1e-14);
    assert!((d - 1.0986123).abs() < 1e-7);
}

#[test]
fn ball_origin_is_unit_height() {
    let q = ball_to_halfspace(BallPoint::ORIGIN);
    assert!(q.x1.abs() < 1e-15 && q.x2.abs() < 1e-15 && (q.h - 1.0).abs() < 1e-15);
}

#[test]
fn equator_leaf_examples() {
    let flat = equidistant_leaf(&equator(), 0.0, Orientation::Plus).unwrap();
    assert_eq!(flat.kind, LeafKind::GeodesicPlane);
    assert!(matches!(flat.carrier, Carrier::Plane { offset, .. } if offset.abs() < 1e-15));

    let cap = equidistant_leaf(&equator(), 0.5, Orientation::Plus).unwrap();
    assert_eq!(cap.kind, LeafKind::Equidistant);
    assert!((mean_curvature_of(&cap) - 0.5).abs() < 1e-10);
    // Angle with the unit sphere along the ideal circle: cos θ = |H|.
    let Carrier::Sphere { center, radius } = cap.carrier else { panic!("expected a sphere") };
    let y = Vec3::X;
    let cos = ((y - center) / radius).dot(y).abs();
    assert!((cos - 0.5).abs() < 1e-12);
    for x in carrier_points(&cap, 20) {
        assert!((conformal_curvature(&cap, x) - 0.5).abs() < 1e-10);
    }

    // Near H = 1 the carrier is almost tangent and the axial point recedes.
    let mut last = 0.0;
    for h in [0.9, 0.99, 0.999] {
        let leaf = equidistant_leaf(&equator(), h, Orientation::Plus).unwrap();
        let Carrier::Sphere { center, radius } = leaf.carrier else { panic!() };
        let axial = [center + Vec3::Z * radius, center - Vec3::Z * radius]
            .into_iter()
            .find(|p| p.norm() < 1.0)
            .unwrap();
        let d = hyp_distance(Vec3::ZERO, axial).unwrap();
        assert!(d > last);
        last = d;
        if h == 0.999 {
            assert!(((y - center) / radius).dot(y).abs() > 0.998);
        }
    }
}

#[test]
fn mean_curvature_examples() {
    let s = CanonicalLeaf::geodesic_sphere(BallPoint::new(Vec3::new(0.2, 0.1, -0.3)).unwrap(), 1.0, Orientation::Minus)
        .unwrap();
    assert_eq!(s.kind, LeafKind::GeodesicSphere);
    let coth1 = 1.0f64.cosh() / 1.0f64.sinh();
    assert!((mean_curvature_of(&s).abs() - coth1).abs() < 1e-12);
    assert!((coth1 - 1.3130353).abs() < 1e-7);
    for x in carrier_points(&s, 20) {
        assert!((conformal_curvature(&s, x) - mean_curvature_of(&s)).abs() < 1e-9);
    }
    let horo = CanonicalLeaf::horosphere(ideal(Vec3::new(1.0, 2.0, 2.0)), 0.4, Orientation::Minus).unwrap();
    assert_eq!(horo.kind, LeafKind::Horosphere);
    assert_eq!(mean_curvature_of(&horo), 1.0);
    assert_eq!(mean_curvature_of(&horo.reversed()), -1.0);
    let plane = equidistant_leaf(&IdealCircle::new(ideal(Vec3::X), FRAC_PI_2).unwrap(), 0.0, Orientation::Minus).unwrap();
    assert_eq!(mean_curvature_of(&plane), 0.0);
}

#[test]
fn side_of_examples() {
    let plane = equidistant_leaf(&equator(), 0.0, Orientation::Plus).unwrap();
    // Upward co-orientation.
    assert!(plane.unit_normal(Vec3::ZERO).dot(Vec3::Z) > 0.0);
    assert_eq!(side_of(&plane, Vec3::ZERO, 1e-9), Side::On);
    assert_eq!(side_of(&plane, Vec3::new(0.0, 0.0, 0.5), 1e-9), Side::Positive);
    assert_eq!(side_of(&plane, Vec3::new(0.0, 0.0, -0.5), 1e-9), Side::Negative);
}

#[test]
fn dilation_examples() {
    let p = HalfSpacePoint::new(0.3, -0.2, 0.7).unwrap();
    assert_eq!(apply_dilation(&DilationIsometry::IDENTITY, p), p);
    let q = apply_dilation(&DilationIsometry::new(2.0).unwrap(), HalfSpacePoint::new(0.0, 0.0, 1.0).unwrap());
    assert_eq!(q, HalfSpacePoint::new(0.0, 0.0, 2.0).unwrap());
    assert!(DilationIsometry::new(0.0).is_err());
}

#[test]
fn hull_margin_examples() {
    let samples: Vec<Vec3> = (0..64)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 64.0;
            Vec3::new(t.cos(), t.sin(), 0.0)
        })
        .collect();
    let in_plus = |y: Vec3| y.z > 0.0;
    let at_origin = shifted_hull_margin(&samples, Vec3::Z, in_plus, 0.0, BallPoint::ORIGIN, 64).unwrap();
    // The hull of the equator is the equatorial plane itself.
    assert!(at_origin.abs() < 1e-9, "{at_origin}");
    let above =
        shifted_hull_margin(&samples, Vec3::Z, in_plus, 0.0, BallPoint::new(Vec3::new(0.0, 0.0, 0.9)).unwrap(), 64)
            .unwrap();
    let expect = -2.0 * 0.9f64.atanh();
    assert!(above < 0.0 && (above - expect).abs() < 1e-9, "{above}");
}

#[test]
fn leaf_kinds_match_curvature_ranges() {
    let circle = IdealCircle::new(ideal(Vec3::new(0.3, -0.4, 0.8)), FRAC_PI_3).unwrap();
    for h in [-0.9, -0.3, 0.0, 0.4, 0.95] {
        let leaf = equidistant_leaf(&circle, h, Orientation::Plus).unwrap();
        let expect = if h == 0.0 { LeafKind::GeodesicPlane } else { LeafKind::Equidistant };
        assert_eq!(leaf.kind, expect);
        assert!(mean_curvature_of(&leaf).abs() < 1.0);
        for x in carrier_points(&leaf, 10) {
            assert!((conformal_curvature(&leaf, x) - h).abs() < 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halfspace_round_trip(p in ball_point()) {
        let b = BallPoint::new(p).unwrap();
        let back = halfspace_to_ball(ball_to_halfspace(b)).unwrap();
        prop_assert!((back.coords() - p).norm() < 1e-12);
    }

    #[test]
    fn isometries_preserve_distance(p in ball_point(), q in ball_point(), t in 0.2f64..5.0, c in unit()) {
        let d = hyp_distance(p, q).unwrap();
        let (bp, bq) = (BallPoint::new(p).unwrap(), BallPoint::new(q).unwrap());
        let dh = ball_to_halfspace(bp).distance(ball_to_halfspace(bq));
        prop_assert!((dh - d).abs() < 1e-10 * d.max(1.0));
        let frame = Frame::from_center(IdealPoint::new(c).unwrap());
        let phi = DilationIsometry::new(t).unwrap();
        let (fp, fq) = (phi.apply_ball(&frame, p), phi.apply_ball(&frame, q));
        prop_assert!((hyp_distance(fp, fq).unwrap() - d).abs() < 1e-9 * d.max(1.0));
        let phi = DilationIsometry::new(3.7).unwrap();
        let (hp, hq) = (apply_dilation(&phi, ball_to_halfspace(bp)), apply_dilation(&phi, ball_to_halfspace(bq)));
        prop_assert!((hp.distance(hq) - d).abs() < 1e-10 * d.max(1.0));
    }

    #[test]
    fn dilations_compose(a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let (s, t) = (DilationIsometry::new(a).unwrap(), DilationIsometry::new(b).unwrap());
        prop_assert_eq!(s.compose(&t).factor(), a * b);
    }

    #[test]
    fn side_is_stable_under_refined_tolerance(p in ball_point(), c in unit(), h in -0.9f64..0.9) {
        let leaf = equidistant_leaf(&IdealCircle::new(IdealPoint::new(c).unwrap(), 1.0).unwrap(), h, Orientation::Plus).unwrap();
        let d = leaf.signed_distance(p).abs();
        for tol in [1e-3, 1e-6, 1e-9] {
            if d > tol {
                prop_assert_eq!(side_of(&leaf, p, tol), side_of(&leaf, p, tol * 1e-3));
            }
        }
    }

    #[test]
    fn shifted_halfspaces_nest(c in unit(), r in 0.3f64..2.8, h1 in -0.9f64..0.9, dh in 0.01f64..0.9) {
        let h2 = (h1 + dh).min(0.95);
        prop_assume!(h2 > h1);
        let circle = IdealCircle::new(IdealPoint::new(c).unwrap(), r).unwrap();
        let lower = equidistant_leaf(&circle, h1, Orientation::Plus).unwrap();
        let upper = ShiftedHalfspace::new(circle, h2, Orientation::Plus).unwrap();
        // The positive region grows with H, so the lower leaf sits inside.
        for x in carrier_points(&lower, 12) {
            let m = upper.margin(x);
            prop_assert!(m > 0.0);
            prop_assert!((m - (h2.atanh() - h1.atanh())).abs() < 1e-7);
        }
    }

    #[test]
    fn hull_margin_is_monotone_in_budget(p in ball_point(), h in -0.8f64..0.8, wobble in 0.0f64..0.3) {
        let curve: Vec<Vec3> = (0..128)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 128.0;
                let polar = 1.0 + wobble * (3.0 * t).cos();
                Vec3::new(polar.sin() * t.cos(), polar.sin() * t.sin(), polar.cos())
            })
            .collect();
        let in_plus = |y: Vec3| y.z > 0.3;
        let b = BallPoint::new(p).unwrap();
        let m64 = shifted_hull_margin(&curve, Vec3::Z, in_plus, h, b, 64).unwrap();
        let m256 = shifted_hull_margin(&curve, Vec3::Z, in_plus, h, b, 256).unwrap();
        prop_assert!(m64 >= m256);
    }
}
