//! Hyperbolic 3-space in the Poincaré ball and upper half-space models.
//!
//! Points are stored in Euclidean coordinates of the model; the ball metric is
//! `λ(x)² |dx|²` with conformal factor `λ(x) = 2 / (1 - |x|²)`.

mod dilation;
mod hull;
mod leaf;
mod transform;

pub use dilation::{apply_dilation, DilationIsometry};
pub use hull::{
    min_margin, shifted_hull_margin, supporting_circles, supporting_directions, IdealCircle, ShiftedHalfspace, SupportingCircle,
};
pub use leaf::{equidistant_leaf, mean_curvature_of, side_of, CanonicalLeaf, Carrier, GenSphere, LeafKind, Orientation, Side};
pub use transform::{ball_to_halfspace, halfspace_to_ball, Frame};

use crate::error::{Error, Result};
use crate::math::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

/// Points closer than this to the unit sphere are treated as ideal.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// Absolute tolerance for geometric predicates in ball coordinates.
pub const PREDICATE_TOL: f64 = 1e-9;

/// A point of hyperbolic space in the Poincaré ball model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BallPoint(Vec3);

impl BallPoint {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n < 1.0 - BOUNDARY_GUARD) || !v.is_finite() {
            return Err(Error::NearIdealBoundary { norm: n });
        }
        Ok(BallPoint(v))
    }

    pub const ORIGIN: BallPoint = BallPoint(Vec3::ZERO);

    #[inline]
    pub fn coords(self) -> Vec3 {
        self.0
    }

    #[inline]
    pub fn conformal_factor(self) -> f64 {
        lambda(self.0)
    }

    pub fn distance(self, other: BallPoint) -> f64 {
        distance_raw(self.0, other.0)
    }
}

/// A point of the upper half-space model; `h` is the height above the boundary plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HalfSpacePoint {
    pub x1: f64,
    pub x2: f64,
    pub h: f64,
}

impl HalfSpacePoint {
    pub fn new(x1: f64, x2: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !x1.is_finite() || !x2.is_finite() || !h.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!(
                "half-space point needs finite coordinates and h > 0 (got h = {h})"
            )));
        }
        Ok(HalfSpacePoint { x1, x2, h })
    }

    #[inline]
    pub fn as_vec(self) -> Vec3 {
        Vec3::new(self.x1, self.x2, self.h)
    }

    /// Hyperbolic distance in the half-space metric `|dx|² / h²`.
    pub fn distance(self, o: HalfSpacePoint) -> f64 {
        let d2 = (self.as_vec() - o.as_vec()).norm2();
        2.0 * (0.5 * d2.sqrt() / (self.h * o.h).sqrt()).asinh()
    }
}

/// A point on the sphere at infinity, stored as a unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdealPoint(Vec3);

impl IdealPoint {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !((n - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidArgument(alloc::format!(
                "ideal point must have unit norm (got {n})"
            )));
        }
        Ok(IdealPoint(v))
    }

    /// Normalizes any nonzero vector onto the unit sphere.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        Ok(IdealPoint(v / n))
    }

    #[inline]
    pub fn coords(self) -> Vec3 {
        self.0
    }

    /// Angle on the unit sphere between two ideal points.
    pub fn angle_to(self, o: IdealPoint) -> f64 {
        let c = self.0.cross(o.0).norm();
        let d = self.0.dot(o.0);
        c.atan2(d)
    }
}

#[inline]
pub(crate) fn lambda(x: Vec3) -> f64 {
    2.0 / (1.0 - x.norm2())
}

#[inline]
pub(crate) fn distance_raw(p: Vec3, q: Vec3) -> f64 {
    let a = 1.0 - p.norm2();
    let b = 1.0 - q.norm2();
    2.0 * ((p - q).norm() / (a * b).sqrt()).asinh()
}

/// Conformal factor `2 / (1 - |p|²)` of the ball metric.
pub fn conformal_factor(p: Vec3) -> Result<f64> {
    Ok(BallPoint::new(p)?.conformal_factor())
}

/// Hyperbolic distance between two points given in ball coordinates.
pub fn hyp_distance(p: Vec3, q: Vec3) -> Result<f64> {
    Ok(BallPoint::new(p)?.distance(BallPoint::new(q)?))
}
