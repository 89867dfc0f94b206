//! The one-parameter dilation group `x ↦ t x` of the upper half-space.

use super::{Frame, HalfSpacePoint};
use crate::error::{Error, Result};
use crate::math::Vec3;

/// Hyperbolic translation along the vertical geodesic through the half-space
/// origin, by signed length `ln t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DilationIsometry {
    t: f64,
}

impl DilationIsometry {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!("dilation factor must be positive, got {t}")));
        }
        Ok(DilationIsometry { t })
    }

    pub const IDENTITY: DilationIsometry = DilationIsometry { t: 1.0 };

    #[inline]
    pub fn factor(&self) -> f64 {
        self.t
    }

    pub fn compose(&self, other: &DilationIsometry) -> DilationIsometry {
        DilationIsometry { t: self.t * other.t }
    }

    pub fn inverse(&self) -> DilationIsometry {
        DilationIsometry { t: 1.0 / self.t }
    }

    #[inline]
    pub fn apply(&self, p: HalfSpacePoint) -> HalfSpacePoint {
        HalfSpacePoint { x1: p.x1 * self.t, x2: p.x2 * self.t, h: p.h * self.t }
    }

    /// Acts on ball coordinates through the half-space picture of `frame`.
    pub fn apply_ball(&self, frame: &Frame, x: Vec3) -> Vec3 {
        frame.half_to_ball(frame.ball_to_half(x) * self.t)
    }
}

/// Applies `φ_t` to a half-space point.
pub fn apply_dilation(phi: &DilationIsometry, p: HalfSpacePoint) -> HalfSpacePoint {
    phi.apply(p)
}
