use std::f64::consts::FRAC_PI_3;

use hyperleaf_core::boundary::*;
use hyperleaf_core::geometry::*;
use hyperleaf_core::mesh::DiscreteSurface;
use hyperleaf_core::oracle::exact_cap_for;
use hyperleaf_core::solver::*;
use hyperleaf_core::verify::*;
use hyperleaf_core::Vec3;
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

fn cfg(resolution: usize) -> SolverConfig {
    SolverConfig { resolution, ..Default::default() }
}

fn family(curve: &IdealCurve, grid: &[f64], resolution: usize) -> LeafFamily {
    let out = sweep(curve, grid, &cfg(resolution)).unwrap();
    assert!(out.failure.is_none(), "{:?}", out.failure);
    out.family
}

fn grid(step: f64, max: f64) -> Vec<f64> {
    let n = (max / step).round() as i32;
    (-n..=n).map(|i| i as f64 * step).collect()
}

/// Pole height of the round `H`-cap in the curve frame.
fn pole_height(h: f64) -> f64 {
    (FRAC_PI_3 / 2.0).tan() * h.atanh().exp()
}

/// Copy of `s` labelled `h` whose interior is pushed alternately to both
/// sides along the normals, so it crosses the original.
fn crossing_copy(s: &DiscreteSurface, h: f64) -> DiscreteSurface {
    let mut c = s.clone();
    let normals = vertex_normals(s);
    let pinned = s.pinned_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (i, v) in c.vertices.iter_mut().enumerate() {
        if !pinned[i] {
            let lam = 2.0 / (1.0 - v.norm2());
            *v += normals[i] * (rng.gen_range(-0.05..0.05) / lam);
        }
    }
    c.h = h;
    c
}

#[test]
fn round_caps_are_separated_by_their_offsets() {
    let f = family(&round(), &[-0.4, 0.0, 0.4], 20_000);
    let r = pairwise_disjoint(&f);
    assert!(r.passed(), "{r:?}");
    let step = 0.4f64.atanh();
    assert!((r.hyperbolic[0][1] - step).abs() < 1e-3, "{r:?}");
    assert!((r.hyperbolic[1][2] - step).abs() < 1e-3, "{r:?}");
    assert!((r.hyperbolic[0][2] - 2.0 * step).abs() < 1e-3, "{r:?}");
}

#[test]
fn single_leaf_checks_pass_vacuously() {
    let f = family(&round(), &[0.0], 2_000);
    assert!(pairwise_disjoint(&f).passed());
    let probes = probes(&round(), 20, 0, 0.95).unwrap();
    let m = probe_monotone(&f, &probes);
    assert!(m.passed() && m.valid == 20, "{m:?}");
    let fill = fill_scan(&f, &probes, 0.0);
    assert_eq!(fill.max_jump, 0.0);
    assert!(fill.passed());
}

#[test]
fn crossed_duplicate_is_detected() {
    let f = family(&round(), &[0.0], 4_000);
    let dup = crossing_copy(&f.leaves[0], 0.01);
    let bad = LeafFamily::from_leaves(round(), f.eps, vec![f.leaves[0].clone(), dup]).unwrap();
    let r = pairwise_disjoint(&bad);
    assert!(!r.passed());
    assert_eq!(r.intersecting, vec![(0, 1)]);
    // A dense probe set sees the crossing too.
    let m = probe_monotone(&bad, &probes(&round(), 200, 1, 0.95).unwrap());
    assert!(!m.passed(), "{m:?}");
}

#[test]
fn axial_probe_tracks_the_cap_poles() {
    let hs = [-0.4, 0.0, 0.4];
    let f = family(&round(), &hs, 10_000);
    let p = probes(&round(), 200, 7, 0.95).unwrap();
    assert_eq!(p[0].foot, (0.0, 0.0));
    let m = probe_monotone(&f, &p);
    assert!(m.passed(), "{m:?}");
    assert_eq!(m.valid, 200);
    let table = crossing_table(&f, &p[..1]);
    for (c, &h) in table[0].iter().zip(&hs) {
        assert_eq!(c.len(), 1);
        let want = (pole_height(h) / p[0].z_lo).ln();
        assert!((c[0] - want).abs() < 5e-3, "{h}: {} vs {want}", c[0]);
    }
}

#[test]
fn swapped_leaves_break_the_ordering() {
    let f = family(&round(), &[-0.4, 0.0, 0.4], 4_000);
    let mut bad = f.clone();
    bad.leaves.swap(0, 2);
    bad.leaves[0].h = -0.4;
    bad.leaves[2].h = 0.4;
    let p = probes(&round(), 50, 0, 0.95).unwrap();
    assert!(probe_monotone(&f, &p).passed());
    let m = probe_monotone(&bad, &p);
    assert!(!m.passed());
    assert_eq!(m.violations, m.valid);
}

#[test]
fn gap_scan_matches_the_cap_spacing() {
    let p = probes(&round(), 1, 0, 0.95).unwrap();
    let dhs = [0.2, 0.1, 0.05, 0.0];
    let r = gap_scan(&round(), 0.0, &dhs, &cfg(10_000), &p).unwrap();
    for &(dh, d) in &r.rows {
        let want = if dh == 0.0 { 0.0 } else { dh.atanh() };
        assert!((d - want).abs() < 5e-3, "{dh}: {d} vs {want}");
    }
    let decay = GapScanReport { h0: 0.0, rows: r.rows[..3].to_vec() };
    assert!(decay.passed());
    assert!((decay.worst_ratio() - 0.5).abs() < 0.03, "{}", decay.worst_ratio());
}

#[test]
fn gap_scan_on_the_trefoil_decays() {
    let p = probes(&trefoil(), 20, 0, 0.95).unwrap();
    let r = gap_scan(&trefoil(), 0.3, &[0.2, 0.1, 0.05], &cfg(10_000), &p).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(gap_scan(&trefoil(), 0.3, &[-0.1], &cfg(2_000), &p).is_err());
}

#[test]
fn fill_scan_refines_and_flags_deleted_leaves() {
    let p = probes(&round(), 50, 3, 0.95).unwrap();
    let fine = family(&round(), &grid(0.1, 0.4), 4_000);
    let coarse = LeafFamily::from_leaves(round(), fine.eps, fine.leaves.iter().step_by(2).cloned().collect()).unwrap();
    // Widest axial spacing of consecutive exact caps on the fine grid, with
    // room for off-axis probes.
    let bound = 1.5 * (0.4f64.atanh() - 0.3f64.atanh());
    let rf = fill_scan(&fine, &p, bound);
    let rc = fill_scan(&coarse, &p, bound);
    assert!(rf.passed() && rf.valid == 50, "{rf:?}");
    assert!(rc.max_jump > rf.max_jump && !rc.passed(), "{rc:?}");
    assert!((rc.swept_fraction - rf.swept_fraction).abs() < 1e-9);
    assert!(rf.swept_fraction > 0.0 && rf.swept_fraction < 1.0);
    let mut gappy = fine.clone();
    gappy.leaves.remove(4);
    let rg = fill_scan(&gappy, &p, bound);
    assert!(!rg.passed(), "{rg:?}");
}

#[test]
fn round_caps_sit_on_their_hull_boundary() {
    for h in [-0.6, 0.0, 0.5] {
        let cap = exact_cap_for(&round(), h, 4_000, 0.02).unwrap();
        let m = hull_margin(&cap, &round(), h, 256).unwrap();
        assert!(m.abs() < 1e-6, "{h}: {m}");
    }
}

#[test]
fn leaf_outside_a_wrong_hull_is_flagged() {
    let cap = exact_cap_for(&round(), 0.0, 4_000, 0.02).unwrap();
    let m = hull_margin(&cap, &round(), 0.5, 256).unwrap();
    assert!(m < -0.1, "{m}");
    let f = LeafFamily::from_leaves(round(), 0.02, vec![cap]).unwrap();
    assert!(hull_containment(&f, 256).unwrap()[0].1 >= -HULL_TOLERANCE);
}

#[test]
fn trefoil_hull_margins() {
    let f = family(&trefoil(), &[-0.6, 0.0, 0.6], 4_000);
    for (h, m) in hull_containment(&f, 256).unwrap() {
        assert!(m >= -HULL_TOLERANCE, "{h}: {m}");
    }
}

#[test]
fn dilated_leaves_are_disjoint() {
    let leaf = solve(&round(), 0.0, &cfg(10_000), None).unwrap().surface;
    let (e, d) = translate_disjointness(&leaf, &round(), 1.2, 1.5).unwrap();
    assert!(e > 0.0);
    assert!((d - 1.25f64.ln()).abs() < 1e-3, "{d}");
    assert!(translate_disjointness(&leaf, &round(), 1.3, 1.3).is_err());
    let t = solve(&trefoil(), 0.2, &cfg(4_000), None).unwrap().surface;
    let (e, d) = translate_disjointness(&t, &trefoil(), 1.1, 1.3).unwrap();
    assert!(e > 0.0 && d > 0.0);
}

#[test]
fn boundary_slope_follows_the_estimate() {
    let flat = solve(&round(), 0.0, &cfg(10_000), None).unwrap().surface;
    let r0 = boundary_slope_check(&flat, &round(), 0.0).unwrap();
    assert!(r0.max_abs_error < 1e-2, "{r0:?}");
    let mut errors = Vec::new();
    for eps in [0.02, 0.01] {
        let c = SolverConfig { eps, ..cfg(10_000) };
        let s = solve(&round(), 0.6, &c, None).unwrap().surface;
        let r = boundary_slope_check(&s, &round(), 0.6).unwrap();
        assert!((r.predicted - 0.75).abs() < 1e-12);
        assert!((r.measured - 0.75).abs() < 0.075, "{r:?}");
        assert!(r.max_rel_error < 0.1, "{r:?}");
        errors.push(r.first_order_rel_error);
        println!("{eps}: {r:?}");
    }
    assert!(errors[1] < errors[0], "{errors:?}");
}

#[test]
fn reports_are_deterministic_and_unique() {
    let f = family(&trefoil(), &[-0.2, 0.2], 2_000);
    let p = probes(&trefoil(), 30, 9, 0.95).unwrap();
    assert_eq!(probes(&trefoil(), 30, 9, 0.95).unwrap(), p);
    assert_eq!(probe_monotone(&f, &p), probe_monotone(&f, &p));
    assert_eq!(pairwise_disjoint(&f), pairwise_disjoint(&f));
    let mut report = VerificationReport::default();
    let c = CheckResult { name: "disjoint".into(), passed: true, margin: 1.0, parameters: vec![], detail: String::new() };
    report.push(c.clone()).unwrap();
    assert!(report.push(c).is_err());
    assert!(report.passed());
}

#[test]
fn ordering_and_disjointness_agree() {
    let p = probes(&trefoil(), 200, 2, 0.95).unwrap();
    let good = family(&trefoil(), &[-0.4, 0.0, 0.4], 4_000);
    let bad = LeafFamily::from_leaves(
        trefoil(),
        good.eps,
        vec![good.leaves[0].clone(), crossing_copy(&good.leaves[1], 0.0), good.leaves[2].clone()],
    )
    .unwrap();
    let bad = LeafFamily {
        leaves: vec![good.leaves[1].clone(), crossing_copy(&good.leaves[1], 0.01)],
        ..bad
    };
    for f in [&good, &bad] {
        let d = pairwise_disjoint(f).passed();
        let m = probe_monotone(f, &p);
        assert_eq!(d, m.passed(), "{m:?}");
    }
}
