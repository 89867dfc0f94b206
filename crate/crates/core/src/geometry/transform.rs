//! Cayley-type map between the ball and the upper half-space.
//!
//! A [`Frame`] first rotates the ball so that a chosen ideal point (the
//! frame center) sits at the north pole `(0, 0, 1)`, then inverts in the
//! sphere of radius `√2` about the south pole. Under that inversion the
//! unit sphere goes to the plane `h = 0`, the frame center goes to the
//! half-space origin, its antipode to `∞`, and the ball origin to `(0, 0, 1)`.
//! The inversion is an involution, so the same formula maps back.

use super::{BallPoint, HalfSpacePoint, IdealPoint};
use crate::error::{Error, Result};
use crate::math::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

const SOUTH: Vec3 = Vec3::new(0.0, 0.0, -1.0);

/// Orthonormal frame `(e1, e2, center)` attached to an ideal point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Frame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub center: Vec3,
}

impl Default for Frame {
    fn default() -> Self {
        Frame { e1: Vec3::X, e2: Vec3::Y, center: Vec3::Z }
    }
}

#[inline]
fn invert(y: Vec3) -> Vec3 {
    let d = y - SOUTH;
    SOUTH + d * (2.0 / d.norm2())
}

impl Frame {
    /// Deterministic frame whose third axis is `center`.
    pub fn from_center(center: IdealPoint) -> Frame {
        let c = center.coords();
        if (c - Vec3::Z).norm() < 1e-15 {
            return Frame::default();
        }
        // Reference axis: project the global x-axis (or y if nearly parallel).
        let reference = if c.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
        let e1 = (reference - c * reference.dot(c)).normalized();
        let e2 = c.cross(e1);
        Frame { e1, e2, center: c }
    }

    #[inline]
    pub fn to_local(&self, x: Vec3) -> Vec3 {
        Vec3::new(x.dot(self.e1), x.dot(self.e2), x.dot(self.center))
    }

    #[inline]
    pub fn to_global(&self, y: Vec3) -> Vec3 {
        self.e1 * y.x + self.e2 * y.y + self.center * y.z
    }

    /// Ball coordinates to half-space coordinates of this frame (unchecked).
    #[inline]
    pub fn ball_to_half(&self, x: Vec3) -> Vec3 {
        invert(self.to_local(x))
    }

    /// Half-space coordinates of this frame to ball coordinates (unchecked).
    #[inline]
    pub fn half_to_ball(&self, q: Vec3) -> Vec3 {
        self.to_global(invert(q))
    }

    pub fn to_halfspace(&self, p: BallPoint) -> HalfSpacePoint {
        let q = self.ball_to_half(p.coords());
        HalfSpacePoint { x1: q.x, x2: q.y, h: q.z }
    }

    pub fn to_ball(&self, q: HalfSpacePoint) -> Result<BallPoint> {
        BallPoint::new(self.half_to_ball(q.as_vec()))
    }

    /// Planar image `(x1, x2)` of an ideal point; the antipode of the center has none.
    pub fn ideal_to_plane(&self, y: IdealPoint) -> Result<(f64, f64)> {
        let local = self.to_local(y.coords());
        if (local - SOUTH).norm() < 1e-12 {
            return Err(Error::InvalidArgument(
                "ideal point maps to the point at infinity of the half-space".into(),
            ));
        }
        let q = invert(local);
        Ok((q.x, q.y))
    }

    pub fn plane_to_ideal(&self, x1: f64, x2: f64) -> IdealPoint {
        let y = self.to_global(invert(Vec3::new(x1, x2, 0.0)));
        IdealPoint(y.normalized())
    }
}

/// `ball_halfspace_transform` in the default frame (north pole ↦ origin).
pub fn ball_to_halfspace(p: BallPoint) -> HalfSpacePoint {
    Frame::default().to_halfspace(p)
}

/// Inverse of [`ball_to_halfspace`].
pub fn halfspace_to_ball(q: HalfSpacePoint) -> Result<BallPoint> {
    Frame::default().to_ball(q)
}
