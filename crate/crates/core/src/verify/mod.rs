//! Executable foliation checks on a computed [`LeafFamily`].

mod bvh;
mod probe;

pub use bvh::{triangles_intersect, Bvh};
pub use probe::{probe_at, probes, radius_bounds, ProbeLine, PROBE_SEGMENTS};
pub use crate::solver::LeafFamily;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::boundary::{sample_angle, IdealCurve};
use crate::error::{Error, Result};
use crate::geometry::{distance_raw, lambda, min_margin, supporting_circles, DilationIsometry};
use crate::math::Vec3;
use crate::mesh::DiscreteSurface;
use crate::solver::{solve, SolverConfig};
#[allow(unused_imports)]
use num_traits::Float;

/// One line of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Signed distance to the pass threshold (positive = passing).
    pub margin: f64,
    pub parameters: Vec<(String, f64)>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub fingerprint: String,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    /// Adds a check; a check name may appear only once.
    pub fn push(&mut self, check: CheckResult) -> Result<()> {
        if self.checks.iter().any(|c| c.name == check.name) {
            return Err(Error::InvalidArgument(format!("check {} reported twice", check.name)));
        }
        self.checks.push(check);
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn vertex_to_mesh(a: &DiscreteSurface, b: &Bvh<'_>) -> (f64, f64) {
    let mut eu = f64::INFINITY;
    let mut hy = f64::INFINITY;
    for &v in &a.vertices {
        let q = b.closest_point(v);
        eu = eu.min((q - v).norm());
        hy = hy.min(distance_raw(v, q));
    }
    (eu, hy)
}

/// Minimum vertex-to-triangle distances between two meshes, both ways:
/// `(euclidean, hyperbolic)`. The hyperbolic value is measured to the
/// Euclidean-closest point and so bounds the true distance from above.
pub fn mesh_separation(a: &DiscreteSurface, b: &DiscreteSurface) -> (f64, f64) {
    let (ba, bb) = (Bvh::new(a), Bvh::new(b));
    let (e1, h1) = vertex_to_mesh(a, &bb);
    let (e2, h2) = vertex_to_mesh(b, &ba);
    (e1.min(e2), h1.min(h2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjointnessReport {
    pub h: Vec<f64>,
    /// Minimum Euclidean vertex-to-triangle distance per pair (∞ on the diagonal).
    pub separation: Vec<Vec<f64>>,
    /// Hyperbolic counterpart of `separation`.
    pub hyperbolic: Vec<Vec<f64>>,
    pub intersecting: Vec<(usize, usize)>,
}

impl DisjointnessReport {
    pub fn min_separation(&self) -> f64 {
        self.separation.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.intersecting.is_empty() && self.min_separation() > 0.0
    }
}

/// Pairwise separation matrix and triangle–triangle intersection test.
pub fn pairwise_disjoint(f: &LeafFamily) -> DisjointnessReport {
    let n = f.len();
    let bvhs: Vec<Bvh<'_>> = f.leaves.iter().map(Bvh::new).collect();
    let mut separation = vec![vec![f64::INFINITY; n]; n];
    let mut hyperbolic = vec![vec![f64::INFINITY; n]; n];
    let mut intersecting = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (e1, h1) = vertex_to_mesh(&f.leaves[i], &bvhs[j]);
            let (e2, h2) = vertex_to_mesh(&f.leaves[j], &bvhs[i]);
            let (e, h) = (e1.min(e2), h1.min(h2));
            separation[i][j] = e;
            separation[j][i] = e;
            hyperbolic[i][j] = h;
            hyperbolic[j][i] = h;
            if e == 0.0 || bvhs[i].intersects(&bvhs[j]) {
                intersecting.push((i, j));
            }
        }
    }
    DisjointnessReport { h: f.h_values(), separation, hyperbolic, intersecting }
}

/// Crossing parameters of every probe with every leaf: `[probe][leaf]`.
pub fn crossing_table(f: &LeafFamily, probes: &[ProbeLine]) -> Vec<Vec<Vec<f64>>> {
    let bvhs: Vec<Bvh<'_>> = f.leaves.iter().map(Bvh::new).collect();
    probes.iter().map(|p| bvhs.iter().map(|b| p.crossings(&f.curve, b)).collect()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub probes: usize,
    /// Probes crossing every leaf exactly once.
    pub valid: usize,
    /// Valid probes whose crossings are not strictly ordered by `H`.
    pub violations: usize,
    /// Fraction of valid probes required.
    pub quota: f64,
}

impl MonotoneReport {
    pub fn valid_fraction(&self) -> f64 {
        if self.probes == 0 {
            1.0
        } else {
            self.valid as f64 / self.probes as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.valid_fraction() >= self.quota
    }
}

/// Single crossing per leaf, or `None` for an invalid probe.
fn single_crossings(row: &[Vec<f64>]) -> Option<Vec<f64>> {
    row.iter().map(|c| if c.len() == 1 { Some(c[0]) } else { None }).collect()
}

/// Crossing parameters must move monotonically with `H`: away from the
/// probe's bottom when the bottom lies on the Ω⁺ side, toward it otherwise.
pub fn probe_monotone(f: &LeafFamily, probes: &[ProbeLine]) -> MonotoneReport {
    let dir = f.curve.plus_side().sign();
    let table = crossing_table(f, probes);
    let mut valid = 0;
    let mut violations = 0;
    for row in &table {
        if let Some(t) = single_crossings(row) {
            valid += 1;
            if t.windows(2).any(|w| !(dir * (w[1] - w[0]) > 0.0)) {
                violations += 1;
            }
        }
    }
    MonotoneReport { probes: probes.len(), valid, violations, quota: 0.9 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapScanReport {
    pub h0: f64,
    /// `(ΔH, d(ΔH))` with `d` the largest crossing displacement over probes.
    pub rows: Vec<(f64, f64)>,
}

impl GapScanReport {
    /// Largest ratio `d(ΔH_{k+1}) / d(ΔH_k)` over consecutive rows.
    pub fn worst_ratio(&self) -> f64 {
        self.rows.windows(2).map(|w| if w[0].1 > 0.0 { w[1].1 / w[0].1 } else { f64::INFINITY }).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].1 < w[0].1) && self.worst_ratio() <= 0.8
    }
}

/// Crossing displacement between the leaf at `h0` and its neighbours at
/// `h0 ± ΔH` for each `ΔH`.
pub fn gap_scan(
    curve: &IdealCurve,
    h0: f64,
    dhs: &[f64],
    cfg: &SolverConfig,
    probes: &[ProbeLine],
) -> Result<GapScanReport> {
    let base = solve(curve, h0, cfg, None)?.surface;
    let base_bvh = Bvh::new(&base);
    let base_t: Vec<Option<f64>> = probes
        .iter()
        .map(|p| {
            let c = p.crossings(curve, &base_bvh);
            (c.len() == 1).then(|| c[0])
        })
        .collect();
    let mut rows = Vec::with_capacity(dhs.len());
    for &dh in dhs {
        if !(dh >= 0.0) {
            return Err(Error::InvalidArgument(format!("ΔH must be non-negative, got {dh}")));
        }
        if dh == 0.0 {
            rows.push((dh, 0.0));
            continue;
        }
        let mut d = 0.0f64;
        for h in [h0 - dh, h0 + dh] {
            let warm = if cfg.warm_start { Some(&base) } else { None };
            let leaf = solve(curve, h, cfg, warm)?.surface;
            let bvh = Bvh::new(&leaf);
            for (p, t0) in probes.iter().zip(&base_t) {
                let c = p.crossings(curve, &bvh);
                if let (Some(t0), 1) = (t0, c.len()) {
                    d = d.max((c[0] - t0).abs());
                }
            }
        }
        rows.push((dh, d));
    }
    Ok(GapScanReport { h0, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FillReport {
    /// Largest jump of the crossing parameter between consecutive leaves.
    pub max_jump: f64,
    pub bound: f64,
    /// Mean fraction of the probe length swept between the extreme leaves.
    pub swept_fraction: f64,
    pub valid: usize,
}

impl FillReport {
    pub fn passed(&self) -> bool {
        self.max_jump <= self.bound
    }
}

/// Checks that consecutive leaves cross every valid probe within `bound`
/// of each other, so the family sweeps the probe without gaps.
pub fn fill_scan(f: &LeafFamily, probes: &[ProbeLine], bound: f64) -> FillReport {
    let table = crossing_table(f, probes);
    let mut max_jump = 0.0f64;
    let mut swept = 0.0;
    let mut valid = 0;
    for (p, row) in probes.iter().zip(&table) {
        if let Some(t) = single_crossings(row) {
            valid += 1;
            for w in t.windows(2) {
                max_jump = max_jump.max((w[1] - w[0]).abs());
            }
            let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            swept += (hi - lo) / p.length();
        }
    }
    let swept_fraction = if valid > 0 { swept / valid as f64 } else { 0.0 };
    FillReport { max_jump, bound, swept_fraction, valid }
}

/// Ideal samples of `curve` used for hull computations.
pub fn hull_samples(curve: &IdealCurve) -> Vec<Vec3> {
    let m = 1024.max(64 * curve.order());
    (0..m).map(|i| curve.point(sample_angle(i, m)).coords()).collect()
}

/// Minimum shifted-hull margin of `s`'s vertices against the `h`-shifted
/// hull of `curve`.
pub fn hull_margin(s: &DiscreteSurface, curve: &IdealCurve, h: f64, budget: usize) -> Result<f64> {
    let samples = hull_samples(curve);
    let circles = supporting_circles(&samples, curve.center().coords(), |y| curve.in_plus(y), h, budget)?;
    Ok(s.vertices.iter().map(|&p| min_margin(&circles, p)).fold(f64::INFINITY, f64::min))
}

/// Per leaf `(H, min margin)` against its own shifted hull.
pub fn hull_containment(f: &LeafFamily, budget: usize) -> Result<Vec<(f64, f64)>> {
    f.leaves.iter().map(|l| Ok((l.h, hull_margin(l, &f.curve, l.h, budget)?))).collect()
}

/// Tolerance of [`hull_containment`].
pub const HULL_TOLERANCE: f64 = 1e-3;

/// Images of `s` under two dilations of the curve frame and their
/// `(euclidean, hyperbolic)` separation.
pub fn translate_disjointness(s: &DiscreteSurface, curve: &IdealCurve, t: f64, u: f64) -> Result<(f64, f64)> {
    if t == u {
        return Err(Error::InvalidArgument("dilation parameters must differ".into()));
    }
    let frame = curve.frame();
    let image = |f: f64| -> Result<DiscreteSurface> {
        let phi = DilationIsometry::new(f)?;
        let mut out = s.clone();
        for v in &mut out.vertices {
            *v = phi.apply_ball(frame, *v);
        }
        Ok(out)
    };
    let (a, b) = (image(t)?, image(u)?);
    let (ba, bb) = (Bvh::new(&a), Bvh::new(&b));
    if ba.intersects(&bb) {
        return Ok((0.0, 0.0));
    }
    Ok(mesh_separation(&a, &b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    /// Predicted drift `H/√(1−H²)·√(1+g²)` at the sampled azimuths (max).
    pub predicted: f64,
    /// Mean measured drift.
    pub measured: f64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    /// Errors of the raw quotient `δ/z`, which ignores the curve's
    /// curvature and so carries an `O(κz)` bias that shrinks with `ε`.
    pub first_order_abs_error: f64,
    pub first_order_rel_error: f64,
    pub samples: usize,
}

/// Measures the horizontal drift per unit height of the free vertices next
/// to the collar ring, inverting the osculating-circle model of the leaf
/// near the curve, and compares it with the boundary estimate.
pub fn boundary_slope_check(s: &DiscreteSurface, curve: &IdealCurve, h: f64) -> Result<SlopeReport> {
    if !(h.abs() < 1.0) {
        return Err(Error::CurvatureOutOfRange { h, limit: 1.0 });
    }
    let pinned = s.pinned_mask();
    let mut near = vec![false; s.vertices.len()];
    for t in &s.triangles {
        if t.iter().any(|&i| pinned[i]) {
            for &i in t {
                near[i] = !pinned[i];
            }
        }
    }
    let frame = curve.frame();
    let so = curve.plus_side().sign();
    let q = h / (1.0 - h * h).sqrt();
    let (mut predicted, mut sum, mut max_abs, mut max_rel, mut n) = (0.0f64, 0.0, 0.0f64, 0.0f64, 0usize);
    let (mut fo_abs, mut fo_rel) = (0.0f64, 0.0f64);
    for (i, &p) in s.vertices.iter().enumerate() {
        if !near[i] {
            continue;
        }
        let y = frame.ball_to_half(p);
        let theta = y.y.atan2(y.x);
        let z = y.z;
        let g = curve.log_gradient(theta);
        let w = (1.0 + g * g).sqrt();
        let kappa = curve.planar_curvature(theta);
        let delta = ((y.x * y.x + y.y * y.y).sqrt() - curve.planar_radius(theta)) / w;
        // Invert δ = (√(1 + 2κ·s·q·z − κ²z²) − 1)/κ for q.
        let q_est = if (kappa * z).abs() < 1e-9 {
            so * delta / z
        } else {
            so * ((kappa * delta + 1.0).powi(2) - 1.0 + kappa * kappa * z * z) / (2.0 * kappa * z)
        };
        let (measured, want) = (q_est * w, q * w);
        predicted = predicted.max(want.abs());
        sum += measured;
        n += 1;
        let err = (measured - want).abs();
        let fo_err = (so * delta / z * w - want).abs();
        max_abs = max_abs.max(err);
        fo_abs = fo_abs.max(fo_err);
        if want != 0.0 {
            max_rel = max_rel.max(err / want.abs());
            fo_rel = fo_rel.max(fo_err / want.abs());
        }
    }
    if n == 0 {
        return Err(Error::InvalidMesh("no free vertices next to the collar ring".into()));
    }
    Ok(SlopeReport {
        predicted,
        measured: sum / n as f64,
        max_abs_error: max_abs,
        max_rel_error: max_rel,
        first_order_abs_error: fo_abs,
        first_order_rel_error: fo_rel,
        samples: n,
    })
}

/// Euclidean center and radius of the hyperbolic ball `B_R(c)`.
pub fn hyperbolic_ball(c: Vec3, r: f64) -> (Vec3, f64) {
    // Points of the diameter through 0 and c at distance R from c.
    let n = c.norm();
    let u = if n > 0.0 { c / n } else { Vec3::X };
    let s = 2.0 * crate::math::atanh(n);
    let far = (0.5 * (s + r)).tanh();
    let near = (0.5 * (s - r)).tanh();
    (u * (0.5 * (far + near)), 0.5 * (far - near))
}

fn clipped_area(a: Vec3, b: Vec3, c: Vec3, center: Vec3, radius: f64, depth: u32) -> f64 {
    let inside = |p: Vec3| (p - center).norm() <= radius;
    let n_in = [a, b, c].iter().filter(|&&p| inside(p)).count();
    let far = {
        // Conservative reject: triangle bounding sphere misses the ball.
        let g = (a + b + c) / 3.0;
        let rr = (a - g).norm().max((b - g).norm()).max((c - g).norm());
        (g - center).norm() > radius + rr
    };
    if far {
        return 0.0;
    }
    let area = |a: Vec3, b: Vec3, c: Vec3| {
        let w = (lambda((a + b) * 0.5).powi(2) + lambda((b + c) * 0.5).powi(2) + lambda((c + a) * 0.5).powi(2)) / 3.0;
        0.5 * (b - a).cross(c - a).norm() * w
    };
    if n_in == 3 {
        return area(a, b, c);
    }
    if depth == 0 {
        return area(a, b, c) * n_in as f64 / 3.0;
    }
    let (ab, bc, ca) = ((a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5);
    clipped_area(a, ab, ca, center, radius, depth - 1)
        + clipped_area(ab, b, bc, center, radius, depth - 1)
        + clipped_area(ca, bc, c, center, radius, depth - 1)
        + clipped_area(ab, bc, ca, center, radius, depth - 1)
}

/// `|Σ ∩ B_R(c)| / |∂B_R|` for each radius.
pub fn area_bound(s: &DiscreteSurface, c: Vec3, radii: &[f64]) -> Vec<(f64, f64)> {
    radii
        .iter()
        .map(|&r| {
            let (center, radius) = hyperbolic_ball(c, r);
            let inside: f64 = s
                .triangles
                .iter()
                .map(|t| {
                    let [a, b, cc] = t.map(|i| s.vertices[i]);
                    clipped_area(a, b, cc, center, radius, 6)
                })
                .sum();
            let sphere = 4.0 * core::f64::consts::PI * r.sinh().powi(2);
            (r, inside / sphere)
        })
        .collect()
}
