//! Ideal boundary curves given as star-shaped radial profiles, their
//! dilation family, and the pinned collar ring used by the solver.
//!
//! A curve lives in the half-space picture of a [`Frame`] centered at its
//! star center: the center goes to the boundary-plane origin and the polar
//! angle `ρ` about the center becomes the planar radius `tan(ρ/2)`. A curve
//! additionally carries a dilation factor `t`, so its planar image is
//! `r(θ) = t·tan(ρ(θ)/2)`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{BallPoint, Frame, IdealPoint};
use crate::math::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

/// Which complementary region of the curve is Ω⁺.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum PlusSide {
    /// Ω⁺ is the star domain around the center.
    Inside,
    Outside,
}

impl PlusSide {
    /// `+1` when Ω⁺ is the inside.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            PlusSide::Inside => 1.0,
            PlusSide::Outside => -1.0,
        }
    }
}

/// Closed curve on the sphere at infinity with polar profile
/// `ρ(θ) = a₀ + Σ aₖ cos kθ + bₖ sin kθ` about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealCurve {
    center: IdealPoint,
    frame: Frame,
    a0: f64,
    harmonics: Vec<(f64, f64)>,
    scale: f64,
    plus: PlusSide,
}

/// Resolution used to validate profiles.
const CHECK_SAMPLES: usize = 4096;

impl IdealCurve {
    /// `harmonics[k-1] = (aₖ, bₖ)`.
    pub fn new(center: IdealPoint, a0: f64, harmonics: Vec<(f64, f64)>, plus: PlusSide) -> Result<IdealCurve> {
        if !a0.is_finite() || harmonics.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidCurve("non-finite Fourier coefficient".into()));
        }
        let curve = IdealCurve { center, frame: Frame::from_center(center), a0, harmonics, scale: 1.0, plus };
        let n = CHECK_SAMPLES.max(64 * curve.order());
        for i in 0..n {
            let rho = curve.rho(TAU * i as f64 / n as f64);
            if !(rho > 0.0 && rho < PI) {
                return Err(Error::InvalidCurve(alloc::format!(
                    "profile leaves (0, π): ρ = {rho} at sample {i}"
                )));
            }
        }
        Ok(curve)
    }

    /// Round circle of spherical radius `rho` about `center`.
    pub fn round(center: IdealPoint, rho: f64, plus: PlusSide) -> Result<IdealCurve> {
        Self::new(center, rho, Vec::new(), plus)
    }

    #[inline]
    pub fn center(&self) -> IdealPoint {
        self.center
    }

    #[inline]
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    #[inline]
    pub fn plus_side(&self) -> PlusSide {
        self.plus
    }

    #[inline]
    pub fn dilation(&self) -> f64 {
        self.scale
    }

    pub fn coefficients(&self) -> (f64, &[(f64, f64)]) {
        (self.a0, &self.harmonics)
    }

    /// Highest harmonic with a nonzero coefficient.
    pub fn order(&self) -> usize {
        self.harmonics.iter().rposition(|&(a, b)| a != 0.0 || b != 0.0).map_or(0, |k| k + 1)
    }

    /// Same curve with Ω⁺ and Ω⁻ exchanged.
    pub fn reversed(&self) -> IdealCurve {
        let plus = match self.plus {
            PlusSide::Inside => PlusSide::Outside,
            PlusSide::Outside => PlusSide::Inside,
        };
        IdealCurve { plus, ..self.clone() }
    }

    /// Profile `ρ(θ)` and its first two derivatives, before dilation.
    pub fn profile(&self, theta: f64) -> (f64, f64, f64) {
        let (mut r, mut d1, mut d2) = (self.a0, 0.0, 0.0);
        for (k, &(a, b)) in self.harmonics.iter().enumerate() {
            let k = (k + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            r += a * c + b * s;
            d1 += k * (b * c - a * s);
            d2 -= k * k * (a * c + b * s);
        }
        (r, d1, d2)
    }

    /// Spherical polar angle of the (dilated) curve at azimuth `theta`.
    pub fn rho(&self, theta: f64) -> f64 {
        let r = self.profile(theta).0;
        if self.scale == 1.0 {
            r
        } else {
            2.0 * (self.scale * (0.5 * r).tan()).atan()
        }
    }

    /// Planar image `r(θ)` with `r′` and `r″`.
    pub fn planar(&self, theta: f64) -> (f64, f64, f64) {
        let (rho, d1, d2) = self.profile(theta);
        let t = (0.5 * rho).tan();
        let sec2 = 1.0 + t * t;
        let r = self.scale * t;
        let r1 = self.scale * 0.5 * sec2 * d1;
        let r2 = self.scale * 0.5 * sec2 * (d2 + t * d1 * d1);
        (r, r1, r2)
    }

    #[inline]
    pub fn planar_radius(&self, theta: f64) -> f64 {
        self.planar(theta).0
    }

    /// Local boundary gradient `g = r′/r` of the planar image.
    pub fn log_gradient(&self, theta: f64) -> f64 {
        let (r, r1, _) = self.planar(theta);
        r1 / r
    }

    /// Signed curvature of the planar image, positive where it bends toward
    /// the center (a round circle of radius `r` has curvature `1/r`).
    pub fn planar_curvature(&self, theta: f64) -> f64 {
        let (r, r1, r2) = self.planar(theta);
        (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1).powf(1.5)
    }

    /// Ideal point at azimuth `theta`.
    pub fn point(&self, theta: f64) -> IdealPoint {
        let (x1, x2) = self.plane_point(theta);
        self.frame.plane_to_ideal(x1, x2)
    }

    pub fn plane_point(&self, theta: f64) -> (f64, f64) {
        let r = self.planar_radius(theta);
        (r * theta.cos(), r * theta.sin())
    }

    /// Whether an ideal direction lies in Ω⁺ (points on the curve count as Ω⁻).
    pub fn in_plus(&self, y: Vec3) -> bool {
        let l = self.frame.to_local(y.normalized());
        let inside = if l.z <= -1.0 + 1e-15 {
            false
        } else {
            let (x1, x2) = (l.x / (1.0 + l.z), l.y / (1.0 + l.z));
            let r = (x1 * x1 + x2 * x2).sqrt();
            r < self.planar_radius(x2.atan2(x1))
        };
        match self.plus {
            PlusSide::Inside => inside,
            PlusSide::Outside => !inside,
        }
    }

    /// The dilation parameter `s` with `(x1, x2) ∈ Γ_s`, i.e. `|x| / r(θ)`.
    pub fn dilation_parameter_of(&self, x1: f64, x2: f64) -> f64 {
        (x1 * x1 + x2 * x2).sqrt() / self.planar_radius(x2.atan2(x1)) * self.scale
    }
}

/// Azimuth of the `i`-th of `m` equally spaced samples.
#[inline]
pub fn sample_angle(i: usize, m: usize) -> f64 {
    TAU * i as f64 / m as f64
}

/// `m` samples equally spaced in azimuth.
///
/// Requires `m ≥ max(4, 4K)` for a profile of order `K`, and a simple
/// closing polyline.
pub fn sample_curve(curve: &IdealCurve, m: usize) -> Result<Vec<IdealPoint>> {
    let need = (4 * curve.order()).max(4);
    if m < need {
        return Err(Error::InvalidArgument(alloc::format!(
            "{m} samples undersample a profile of order {} (need at least {need})",
            curve.order()
        )));
    }
    let pts: Vec<IdealPoint> = (0..m).map(|i| curve.point(sample_angle(i, m))).collect();
    let shape = star_shape_of(curve.frame(), &pts)?;
    if !shape.star {
        return Err(Error::InvalidCurve("sampled polyline is not simple".into()));
    }
    Ok(pts)
}

/// Outcome of a star-shapedness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarShape {
    pub star: bool,
    /// Minimum planar radius of the image.
    pub margin: f64,
}

/// Star-shapedness about the frame center of a closed polyline of ideal
/// points: its planar image must wind once around the origin with strictly
/// monotone azimuth, so every ray from the origin meets it exactly once.
pub fn star_shape_of(frame: &Frame, pts: &[IdealPoint]) -> Result<StarShape> {
    if pts.len() < 3 {
        return Err(Error::InvalidCurve("need at least 3 points".into()));
    }
    let plane = pts.iter().map(|&p| frame.ideal_to_plane(p)).collect::<Result<Vec<_>>>()?;
    let margin = plane.iter().map(|&(x, y)| (x * x + y * y).sqrt()).fold(f64::INFINITY, f64::min);
    if !(margin > 0.0) {
        return Ok(StarShape { star: false, margin });
    }
    let n = plane.len();
    let mut total = 0.0;
    let mut sign = 0.0;
    for i in 0..n {
        let (x0, y0) = plane[i];
        let (x1, y1) = plane[(i + 1) % n];
        let step = (x0 * y1 - y0 * x1).atan2(x0 * x1 + y0 * y1);
        if step == 0.0 || (sign != 0.0 && step.signum() != sign) {
            return Ok(StarShape { star: false, margin });
        }
        sign = step.signum();
        total += step;
    }
    Ok(StarShape { star: (total.abs() - TAU).abs() < 1e-6, margin })
}

/// Star-shapedness of a curve, tested on a dense sampling.
pub fn is_star_shaped(curve: &IdealCurve) -> StarShape {
    let m = CHECK_SAMPLES.max(64 * curve.order());
    let pts: Vec<IdealPoint> = (0..m).map(|i| curve.point(sample_angle(i, m))).collect();
    star_shape_of(curve.frame(), &pts).unwrap_or(StarShape { star: false, margin: 0.0 })
}

/// `Γ_t`: the curve whose planar image is `t` times that of `curve`.
pub fn dilate_curve(curve: &IdealCurve, t: f64) -> Result<IdealCurve> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("dilation factor must be positive, got {t}")));
    }
    Ok(IdealCurve { scale: curve.scale * t, ..curve.clone() })
}

/// Horizontal drift per unit height of an `H`-leaf over a boundary point with
/// log-gradient `g`: `H/√(1−H²)·√(1+g²)`.
#[inline]
pub fn drift_rate(h: f64, g: f64) -> f64 {
    h / (1.0 - h * h).sqrt() * (1.0 + g * g).sqrt()
}

/// Near-boundary model of an `H`-leaf over the sampled curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CollarModel {
    pub h: f64,
    /// Lift height in half-space coordinates of the curve frame.
    pub height: f64,
    /// Per-sample drift rate, horizontal displacement per unit height.
    pub drift: Vec<f64>,
}

impl CollarModel {
    pub fn new(curve: &IdealCurve, h: f64, height: f64, m: usize) -> Result<CollarModel> {
        check_collar_args(h, height)?;
        let drift = (0..m).map(|i| drift_rate(h, curve.log_gradient(sample_angle(i, m)))).collect();
        Ok(CollarModel { h, height, drift })
    }
}

fn check_collar_args(h: f64, eps: f64) -> Result<()> {
    if !(h.abs() < 1.0) {
        return Err(Error::CurvatureOutOfRange { h, limit: 1.0 });
    }
    if !(eps > 0.0 && eps <= 0.05) {
        return Err(Error::InvalidArgument(alloc::format!("collar height must lie in (0, 0.05], got {eps}")));
    }
    Ok(())
}

fn lift(curve: &IdealCurve, theta: f64, radius: f64, eps: f64) -> Result<BallPoint> {
    let q = Vec3::new(radius * theta.cos(), radius * theta.sin(), eps);
    let x = curve.frame().half_to_ball(q);
    if x.norm() > 1.0 - 0.25 * eps {
        return Err(Error::InvalidCurve(alloc::format!(
            "collar point at azimuth {theta} is too close to the ideal boundary (|p| = {})",
            x.norm()
        )));
    }
    BallPoint::new(x)
}

/// First-order collar: each sample lifted to height `ε` and moved radially
/// by `ε·drift` toward Ω⁻.
pub fn collar_ring(curve: &IdealCurve, h: f64, eps: f64, m: usize) -> Result<Vec<BallPoint>> {
    check_collar_args(h, eps)?;
    let s = curve.plus_side().sign();
    (0..m)
        .map(|i| {
            let th = sample_angle(i, m);
            let r = curve.planar_radius(th);
            lift(curve, th, r + s * eps * drift_rate(h, curve.log_gradient(th)), eps)
        })
        .collect()
}

/// Radial collar displacement from the osculating leaf: the round `H`-cap
/// over the osculating circle of the planar image, evaluated at height `ε`.
/// Agrees with `ε·drift` to first order and is exact for round circles.
pub fn osculating_offset(curve: &IdealCurve, h: f64, eps: f64, theta: f64) -> f64 {
    let s = curve.plus_side().sign();
    let q = h / (1.0 - h * h).sqrt();
    let kappa = curve.planar_curvature(theta);
    let g = curve.log_gradient(theta);
    let a = s * q * eps;
    let normal = if (kappa * eps).abs() < 1e-9 {
        a
    } else {
        let disc = 1.0 + 2.0 * kappa * a - kappa * kappa * eps * eps;
        (disc.max(0.0).sqrt() - 1.0) / kappa
    };
    normal * (1.0 + g * g).sqrt()
}

/// Collar ring pinned to the osculating leaf at each sample.
pub fn osculating_collar_ring(curve: &IdealCurve, h: f64, eps: f64, m: usize) -> Result<Vec<BallPoint>> {
    check_collar_args(h, eps)?;
    (0..m)
        .map(|i| {
            let th = sample_angle(i, m);
            lift(curve, th, curve.planar_radius(th) + osculating_offset(curve, h, eps, th), eps)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn north() -> IdealPoint {
        IdealPoint::new(Vec3::Z).unwrap()
    }

    #[test]
    fn round_profile_samples() {
        let c = IdealCurve::round(north(), PI / 3.0, PlusSide::Inside).unwrap();
        let pts = sample_curve(&c, 4).unwrap();
        for (i, p) in pts.iter().enumerate() {
            let v = p.coords();
            assert!((v.z - 0.5).abs() < 1e-12);
            let az = v.y.atan2(v.x).rem_euclid(TAU);
            assert!((az - sample_angle(i, 4)).abs() < 1e-12);
        }
    }

    #[test]
    fn undersampling_guard() {
        let mut h = alloc::vec![(0.0, 0.0); 9];
        h[8] = (0.05, 0.0);
        let c = IdealCurve::new(north(), PI / 3.0, h, PlusSide::Inside).unwrap();
        assert!(sample_curve(&c, 4).is_err());
        assert!(sample_curve(&c, 36).is_ok());
    }

    #[test]
    fn drift_values() {
        assert_eq!(drift_rate(0.0, 0.3), 0.0);
        assert!((drift_rate(0.6, 0.0) - 0.75).abs() < 1e-15);
        assert_eq!(drift_rate(0.4, 0.7), drift_rate(0.4, -0.7));
    }

    #[test]
    fn osculating_offset_is_exact_for_round_caps() {
        let c = IdealCurve::round(north(), PI / 3.0, PlusSide::Inside).unwrap();
        let h: f64 = 0.6;
        let r0 = c.planar_radius(0.0);
        let eps = 0.02;
        let r = r0 + osculating_offset(&c, h, eps, 0.0);
        let q = h / (1.0 - h * h).sqrt();
        let (zc, rs) = (q * r0, r0 * (1.0 + q * q).sqrt());
        assert!((r * r + (eps - zc) * (eps - zc) - rs * rs).abs() < 1e-14);
        assert!(((r - r0) / eps - 0.75).abs() < 0.05);
    }
}
