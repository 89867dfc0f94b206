//! Probe geodesics: vertical lines of the curve's half-space frame, with
//! endpoints certified against round barrier leaves.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bvh::Bvh;
use crate::boundary::{IdealCurve, PlusSide};
use crate::error::{Error, Result};
use crate::geometry::{equidistant_leaf, side_of, CanonicalLeaf, IdealCircle, Orientation, Side};
use crate::math::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

/// Segments per probe polyline.
pub const PROBE_SEGMENTS: usize = 1000;

/// A vertical geodesic `{(x1, x2, z) : z_lo ≤ z ≤ z_hi}` of the curve frame,
/// sampled as a polyline in ball coordinates. The bottom endpoint is on the
/// Ω-side of the foot point, the top endpoint on the other side, for every
/// leaf with `|H| ≤ h_limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeLine {
    pub foot: (f64, f64),
    pub z_lo: f64,
    pub z_hi: f64,
    pub points: Vec<Vec3>,
}

impl ProbeLine {
    /// Hyperbolic length of the probe.
    pub fn length(&self) -> f64 {
        (self.z_hi / self.z_lo).ln()
    }

    /// Arclength parameters (from the bottom) of the crossings with a mesh.
    pub fn crossings(&self, curve: &IdealCurve, bvh: &Bvh<'_>) -> Vec<f64> {
        let frame = curve.frame();
        let mut out: Vec<f64> = Vec::new();
        for w in self.points.windows(2) {
            for s in bvh.segment_hits(w[0], w[1]) {
                let p = w[0] + (w[1] - w[0]) * s;
                let t = (frame.ball_to_half(p).z / self.z_lo).ln();
                if out.last().map_or(true, |&l| t - l > 1e-9) {
                    out.push(t);
                }
            }
        }
        out
    }
}

/// Planar radius bounds of the curve image, from a dense sampling.
pub fn radius_bounds(curve: &IdealCurve) -> (f64, f64) {
    let m = 2048.max(64 * curve.order());
    (0..m)
        .map(|i| curve.planar_radius(core::f64::consts::TAU * i as f64 / m as f64))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

fn barrier(curve: &IdealCurve, planar_r: f64, h: f64) -> Result<CanonicalLeaf> {
    let side = match curve.plus_side() {
        PlusSide::Inside => Orientation::Plus,
        PlusSide::Outside => Orientation::Minus,
    };
    let circle = IdealCircle::new(curve.center(), 2.0 * planar_r.atan())?;
    equidistant_leaf(&circle, h, side)
}

/// Height where the vertical line over `foot` changes side of `leaf`.
fn crossing_height(curve: &IdealCurve, leaf: &CanonicalLeaf, foot: (f64, f64)) -> f64 {
    let frame = curve.frame();
    let f = |lz: f64| leaf.signed_distance(frame.half_to_ball(Vec3::new(foot.0, foot.1, lz.exp())));
    let (mut lo, mut hi) = (-20.0f64, 20.0f64);
    let s_lo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Builds one certified probe over `foot`, or `None` if the barrier leaves
/// cannot certify it.
pub fn probe_at(curve: &IdealCurve, foot: (f64, f64), h_limit: f64) -> Result<Option<ProbeLine>> {
    let (r_in, r_out) = radius_bounds(curve);
    let s = curve.plus_side().sign();
    // Bottom sits in the Ω-side region of the smallest such region of the
    // family, the top in the complement of the largest.
    let bottom_leaf = barrier(curve, r_in, -s * h_limit)?;
    let top_leaf = barrier(curve, r_out, s * h_limit)?;
    let z_lo = 0.5 * crossing_height(curve, &bottom_leaf, foot);
    let z_hi = 2.0 * crossing_height(curve, &top_leaf, foot);
    let frame = curve.frame();
    let bottom = frame.half_to_ball(Vec3::new(foot.0, foot.1, z_lo));
    let top = frame.half_to_ball(Vec3::new(foot.0, foot.1, z_hi));
    let (want_bottom, want_top) =
        if s > 0.0 { (Side::Positive, Side::Negative) } else { (Side::Negative, Side::Positive) };
    if !(z_lo < z_hi) || side_of(&bottom_leaf, bottom, 0.0) != want_bottom || side_of(&top_leaf, top, 0.0) != want_top {
        return Ok(None);
    }
    let n = PROBE_SEGMENTS;
    let points = (0..=n)
        .map(|i| {
            let z = z_lo * (z_hi / z_lo).powf(i as f64 / n as f64);
            frame.half_to_ball(Vec3::new(foot.0, foot.1, z))
        })
        .collect();
    Ok(Some(ProbeLine { foot, z_lo, z_hi, points }))
}

/// `count` certified probes with feet drawn uniformly from the disk of
/// radius `0.7·r_min` (seeded), the first one on the axis.
pub fn probes(curve: &IdealCurve, count: usize, seed: u64, h_limit: f64) -> Result<Vec<ProbeLine>> {
    if !(h_limit > 0.0 && h_limit < 1.0) {
        return Err(Error::CurvatureOutOfRange { h: h_limit, limit: 1.0 });
    }
    let (r_in, _) = radius_bounds(curve);
    let radius = 0.7 * r_in;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 20 * count + 20 {
            return Err(Error::InvalidArgument("could not certify enough probe lines".into()));
        }
        let foot = if out.is_empty() {
            (0.0, 0.0)
        } else {
            let r = radius * rng.gen::<f64>().sqrt();
            let a = core::f64::consts::TAU * rng.gen::<f64>();
            (r * a.cos(), r * a.sin())
        };
        if let Some(p) = probe_at(curve, foot, h_limit)? {
            out.push(p);
        }
    }
    Ok(out)
}
