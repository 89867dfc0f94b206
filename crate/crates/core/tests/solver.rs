use std::f64::consts::FRAC_PI_3;

use hyperleaf_core::boundary::*;
use hyperleaf_core::geometry::*;
use hyperleaf_core::solver::*;
use hyperleaf_core::verify::{area_bound, Bvh, hull_margin, HULL_TOLERANCE};
use hyperleaf_core::{Error, Vec3};

fn north() -> IdealPoint {
    IdealPoint::new(Vec3::Z).unwrap()
}

fn round() -> IdealCurve {
    IdealCurve::round(north(), FRAC_PI_3, PlusSide::Inside).unwrap()
}

fn trefoil() -> IdealCurve {
    IdealCurve::new(north(), FRAC_PI_3, vec![(0.0, 0.0), (0.0, 0.0), (0.2, 0.0)], PlusSide::Inside).unwrap()
}

fn cap_distance(s: &hyperleaf_core::mesh::DiscreteSurface, h: f64) -> f64 {
    let circle = IdealCircle::new(north(), FRAC_PI_3).unwrap();
    let leaf = equidistant_leaf(&circle, h, Orientation::Plus).unwrap();
    s.vertices
        .iter()
        .map(|&p| leaf.signed_hyperbolic_distance(BallPoint::new(p).unwrap()).unwrap().abs())
        .fold(0.0, f64::max)
}

#[test]
fn round_initial_mesh_is_almost_solved() {
    let cfg = SolverConfig::default();
    for h in [-0.5, 0.0, 0.5] {
        let s = solve(&round(), h, &cfg, None).unwrap();
        assert!(s.report.iterations <= 5, "{h}: {:?}", s.report);
    }
}

#[test]
fn trefoil_initial_mesh_is_a_disk_inside_the_collar() {
    let cfg = SolverConfig::default();
    let s = build_initial_mesh(&trefoil(), 0.3, &cfg).unwrap();
    assert_eq!(s.audit().unwrap().euler, 1);
    assert!(s.vertices.len() >= cfg.resolution);
    assert!(s.vertices.iter().all(|v| v.norm() <= 1.0 - cfg.eps / 4.0));
}

#[test]
fn coarse_resolution_is_rejected() {
    let cfg = SolverConfig { resolution: 150, ..Default::default() };
    assert!(matches!(build_initial_mesh(&round(), 0.0, &cfg), Err(Error::InvalidArgument(_))));
}

#[test]
fn solve_matches_exact_caps() {
    let cfg = SolverConfig::default();
    for h in [0.0, 0.5] {
        let s = solve(&round(), h, &cfg, None).unwrap();
        assert!(cap_distance(&s.surface, h) < 5e-3);
        assert!(s.report.residual.median < cfg.residual_tolerance);
    }
}

#[test]
fn near_horospheric_curvature_is_rejected() {
    let cfg = SolverConfig::default();
    match solve(&round(), 0.999, &cfg, None) {
        Err(Error::CurvatureOutOfRange { h, .. }) => assert_eq!(h, 0.999),
        other => panic!("expected a curvature error, got {:?}", other.map(|s| s.report)),
    }
    assert!(solve(&round(), -1.0, &cfg, None).is_err());
}

#[test]
fn failures_carry_diagnostics() {
    let cfg = SolverConfig { max_iterations: 0, ..Default::default() };
    match solve(&trefoil(), 0.3, &cfg, None) {
        Err(Error::SolverFailed(f)) => {
            assert_eq!(f.h, 0.3);
            assert!(f.reason.contains("no convergence"));
            assert!(f.gradient_norm > 0.0 && f.energy.is_finite());
        }
        other => panic!("expected a solver failure, got {:?}", other.map(|s| s.report)),
    }
}

#[test]
fn solves_are_deterministic() {
    let cfg = SolverConfig { resolution: 2_000, ..Default::default() };
    let a = solve(&trefoil(), -0.4, &cfg, None).unwrap();
    let b = solve(&trefoil(), -0.4, &cfg, None).unwrap();
    assert_eq!(a.surface, b.surface);
    assert_eq!(a.report, b.report);
}

#[test]
fn energy_decreases_along_the_history() {
    let cfg = SolverConfig { resolution: 4_000, ..Default::default() };
    for h in [-0.6, 0.2, 0.7] {
        let s = solve(&trefoil(), h, &cfg, None).unwrap();
        assert!(s.report.iterations >= 1);
        assert_eq!(s.report.history.len(), s.report.iterations + 1);
        assert!(s.report.history.windows(2).all(|w| w[1] <= w[0]), "{:?}", s.report.history);
    }
}

#[test]
fn warm_start_agrees_with_a_cold_solve() {
    let cfg = SolverConfig { resolution: 4_000, ..Default::default() };
    let prev = solve(&trefoil(), 0.2, &cfg, None).unwrap();
    let cold = solve(&trefoil(), 0.3, &cfg, None).unwrap();
    let warm = solve(&trefoil(), 0.3, &cfg, Some(&prev.surface)).unwrap();
    let bvh = Bvh::new(&cold.surface);
    let gap = warm.surface.vertices.iter().map(|&p| hyp_distance(p, bvh.closest_point(p)).unwrap());
    let gap = gap.fold(0.0, f64::max);
    assert!(gap < 5e-3, "{gap}");
    let other = solve(&trefoil(), 0.3, &SolverConfig { resolution: 2_000, ..cfg }, None).unwrap();
    assert!(solve(&trefoil(), 0.3, &cfg, Some(&other.surface)).is_err());
}

#[test]
fn sweep_of_nine_round_leaves() {
    let cfg = SolverConfig { resolution: 4_000, ..Default::default() };
    let grid: Vec<f64> = (-4..=4).map(|i| 0.2 * i as f64).collect();
    let out = sweep(&round(), &grid, &cfg).unwrap();
    assert!(out.failure.is_none());
    assert_eq!(out.family.len(), 9);
    assert_eq!(out.family.h_values(), grid);
    assert_eq!(out.family.reports.len(), 9);
}

#[test]
fn sweep_guards() {
    let cfg = SolverConfig { resolution: 1_000, ..Default::default() };
    let single = sweep(&round(), &[0.0], &cfg).unwrap();
    assert_eq!(single.family.len(), 1);
    assert!(sweep(&round(), &[0.2, 0.1], &cfg).is_err());
    assert!(sweep(&round(), &[0.1, 0.1], &cfg).is_err());
    assert!(sweep(&round(), &[], &cfg).is_err());
    assert!(sweep(&round(), &[0.0, 0.97], &cfg).is_err());
}

#[test]
fn partial_sweeps_report_the_failure() {
    let cfg = SolverConfig { resolution: 1_000, max_iterations: 0, ..Default::default() };
    let out = sweep(&trefoil(), &[-0.2, 0.0, 0.2], &cfg).unwrap();
    assert!(matches!(out.failure, Some(Error::SolverFailed(_))));
    assert!(out.family.len() < 3);
}

#[test]
fn solved_leaves_stay_in_their_hull_and_under_the_area_bound() {
    let cfg = SolverConfig { resolution: 4_000, ..Default::default() };
    let apex = reference_apex(&trefoil());
    for h in [-0.8, 0.0, 0.8] {
        let s = solve(&trefoil(), h, &cfg, None).unwrap();
        let m = hull_margin(&s.surface, &trefoil(), h, 256).unwrap();
        assert!(m >= -HULL_TOLERANCE, "{h}: {m}");
        for (r, ratio) in area_bound(&s.surface, apex, &[1.0, 2.0, 3.0]) {
            assert!(ratio < 1.0, "{h} R={r}: {ratio}");
        }
    }
}
