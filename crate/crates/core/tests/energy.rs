use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use hyperleaf_core::boundary::*;
use hyperleaf_core::geometry::*;
use hyperleaf_core::oracle::{exact_cap, exact_cap_for};
use hyperleaf_core::solver::*;
use hyperleaf_core::Vec3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn north() -> IdealPoint {
    IdealPoint::new(Vec3::Z).unwrap()
}

fn round() -> IdealCurve {
    IdealCurve::round(north(), FRAC_PI_3, PlusSide::Inside).unwrap()
}

fn trefoil() -> IdealCurve {
    IdealCurve::new(north(), FRAC_PI_3, vec![(0.0, 0.0), (0.0, 0.0), (0.2, 0.0)], PlusSide::Inside).unwrap()
}

fn small_mesh(curve: &IdealCurve, h: f64, n: usize) -> hyperleaf_core::mesh::DiscreteSurface {
    build_initial_mesh(curve, h, &SolverConfig { resolution: n, ..Default::default() }).unwrap()
}

/// Moves every interior vertex by a random hyperbolic amount of at most `amp`.
fn jitter(s: &mut hyperleaf_core::mesh::DiscreteSurface, amp: f64, rng: &mut ChaCha8Rng) {
    let pinned = s.pinned_mask();
    for (v, &p) in s.vertices.iter_mut().zip(&pinned) {
        if !p {
            let d = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let lam = 2.0 / (1.0 - v.norm2());
            *v += d * (amp / lam);
        }
    }
}

#[test]
fn reference_surface_has_zero_volume() {
    let s = small_mesh(&trefoil(), 0.3, 500);
    let e = energy(&s, 0.3, &s).unwrap();
    assert_eq!(e.volume, 0.0);
    assert_eq!(e.energy, e.area);
}

#[test]
fn reference_must_share_the_boundary() {
    let a = small_mesh(&round(), 0.0, 500);
    let b = small_mesh(&round(), 0.5, 500);
    assert!(energy(&a, 0.0, &b).is_err());
}

#[test]
fn flat_cap_area_matches_the_truncated_plane() {
    // The equatorial plane is a unit hemisphere in the frame; above height
    // ε its hyperbolic area is 2π(1/ε − 1).
    let eps = 0.02;
    let circle = IdealCircle::new(north(), FRAC_PI_2).unwrap();
    let cap = exact_cap(&circle, 0.0, 10_000, eps).unwrap();
    let exact = 2.0 * PI * (1.0 / eps - 1.0);
    let a = surface_area(&cap);
    assert!(((a - exact) / exact).abs() < 5e-3, "{a} vs {exact}");
}

#[test]
fn energy_differences_do_not_depend_on_the_reference() {
    let curve = trefoil();
    let base = small_mesh(&curve, 0.4, 800);
    let m1 = cone_reference(&base, reference_apex(&curve));
    let m2 = cone_reference(&base, Vec3::new(0.05, -0.1, 0.2));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shifts: Vec<f64> = (0..10)
        .map(|_| {
            let mut s = base.clone();
            jitter(&mut s, 0.05, &mut rng);
            energy(&s, 0.4, &m1).unwrap().energy - energy(&s, 0.4, &m2).unwrap().energy
        })
        .collect();
    let mean = shifts.iter().sum::<f64>() / 10.0;
    let var = shifts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 10.0;
    assert!(var < 1e-9, "{var}");
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..20 {
        let curve = if case % 2 == 0 { round() } else { trefoil() };
        let h = rng.gen_range(-0.8..0.8);
        let mut s = small_mesh(&curve, h, 300);
        jitter(&mut s, 0.02, &mut rng);
        let flux = surface_flux(&cone_reference(&s, reference_apex(&curve)));
        let g = energy_gradient(&s, h);
        let pinned = s.pinned_mask();
        let step = 1e-6;
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let i = loop {
                let i = rng.gen_range(0..s.vertices.len());
                if !pinned[i] {
                    break i;
                }
            };
            let mut fd = [0.0; 3];
            for (k, e) in [Vec3::X, Vec3::Y, Vec3::Z].into_iter().enumerate() {
                let d = e * (step / (2.0 / (1.0 - s.vertices[i].norm2())));
                let mut p = s.clone();
                p.vertices[i] += d;
                let mut m = s.clone();
                m.vertices[i] -= d;
                fd[k] = (energy_with_flux(&p, h, flux).energy - energy_with_flux(&m, h, flux).energy) / (2.0 * d.norm());
            }
            let fd = Vec3::new(fd[0], fd[1], fd[2]);
            worst = worst.max((fd - g[i]).norm() / g[i].norm().max(1e-3));
        }
        assert!(worst < 1e-5, "case {case}: {worst}");
    }
}

#[test]
fn exact_caps_are_nearly_critical() {
    for h in [-0.6, 0.0, 0.6] {
        let cap = exact_cap_for(&round(), h, 10_000, 0.02).unwrap();
        let g = energy_gradient(&cap, h);
        let n = normal_gradient_norm(&cap, &g);
        let bound = 5e-3 * (cap.vertices.len() as f64).sqrt();
        assert!(n < bound, "{h}: {n} vs {bound}");
    }
}

#[test]
fn residual_tracks_the_curvature() {
    let curve = round();
    let coarse = exact_cap_for(&curve, 0.4, 2_500, 0.02).unwrap();
    let fine = exact_cap_for(&curve, 0.4, 10_000, 0.02).unwrap();
    let rc = mean_curvature_residual(&coarse, 0.4);
    let rf = mean_curvature_residual(&fine, 0.4);
    assert!(rf.median < 5e-3, "{rf:?}");
    assert!(rc.median / rf.median >= 1.5, "{rc:?} {rf:?}");
    let wrong = mean_curvature_residual(&fine, 0.6);
    assert!(wrong.median > 0.1, "{wrong:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn volume_is_additive_over_references(seed in any::<u64>(), h in -0.9f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = small_mesh(&round(), h, 300);
        let mut t = s.clone();
        jitter(&mut t, 0.05, &mut rng);
        let a = cone_reference(&s, reference_apex(&round()));
        // V(t; a) = V(t; s) + V(s; a).
        let lhs = energy(&t, h, &a).unwrap().volume;
        let rhs = energy(&t, h, &s).unwrap().volume + energy(&s, h, &a).unwrap().volume;
        prop_assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
    }
}
