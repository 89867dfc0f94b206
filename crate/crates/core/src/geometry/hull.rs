//! Round ideal circles, H-shifted halfspaces and the sampled shifted hull.

use alloc::vec::Vec;

use super::leaf::{equidistant_leaf, CanonicalLeaf, Orientation};
use super::{BallPoint, IdealPoint};
use crate::error::{Error, Result};
use crate::math::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

/// Round circle `{y : y·c = cos α}` on the sphere at infinity. Its *axis cap*
/// is `{y·c > cos α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdealCircle {
    axis: IdealPoint,
    radius: f64,
}

impl IdealCircle {
    /// `radius` is the spherical angle α ∈ (0, π) from the axis.
    pub fn new(axis: IdealPoint, radius: f64) -> Result<IdealCircle> {
        if !(radius > 0.0 && radius < core::f64::consts::PI) {
            return Err(Error::InvalidArgument(alloc::format!(
                "circle radius must lie in (0, π), got {radius}"
            )));
        }
        Ok(IdealCircle { axis, radius })
    }

    #[inline]
    pub fn axis(&self) -> Vec3 {
        self.axis.coords()
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn cos_radius(&self) -> f64 {
        self.radius.cos()
    }

    #[inline]
    pub fn sin_radius(&self) -> f64 {
        self.radius.sin()
    }

    /// The same circle described from the opposite cap.
    pub fn complement(&self) -> IdealCircle {
        IdealCircle {
            axis: IdealPoint(-self.axis.coords()),
            radius: core::f64::consts::PI - self.radius,
        }
    }

    /// Point of the circle at azimuth `phi` around the axis.
    pub fn point(&self, phi: f64) -> Vec3 {
        let c = self.axis();
        let e1 = c.any_orthonormal();
        let e2 = c.cross(e1);
        let (s, co) = self.radius.sin_cos();
        c * co + (e1 * phi.cos() + e2 * phi.sin()) * s
    }
}

/// Closed region of hyperbolic space bounded by the equidistant leaf `P_H`
/// of a round circle, on the `side` cap. The realized leaf is co-oriented
/// into the region, so the region is `{signed distance ≥ 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftedHalfspace {
    pub ideal_circle: IdealCircle,
    pub h: f64,
    pub side: Orientation,
    pub realized_leaf: CanonicalLeaf,
}

impl ShiftedHalfspace {
    pub fn new(ideal_circle: IdealCircle, h: f64, side: Orientation) -> Result<ShiftedHalfspace> {
        let realized_leaf = equidistant_leaf(&ideal_circle, h, side)?;
        Ok(ShiftedHalfspace { ideal_circle, h, side, realized_leaf })
    }

    /// Signed hyperbolic distance of `p` to the boundary leaf, positive inside.
    pub fn margin(&self, p: Vec3) -> f64 {
        self.realized_leaf
            .gen()
            .signed_hyperbolic_distance(p)
            .expect("equidistant leaves have |H| < 1")
    }

    pub fn contains(&self, p: BallPoint, tol: f64) -> bool {
        self.margin(p.coords()) >= -tol
    }
}

/// A shifted halfspace whose ideal cap contains every curve sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportingCircle {
    pub halfspace: ShiftedHalfspace,
    /// True when the empty complementary cap lies in Ω⁺.
    pub empty_cap_in_plus: bool,
}

/// Prefix-nested direction sequence on the unit sphere: the first two
/// entries are `±center`, the rest a low-discrepancy additive sequence
/// rotated so its pole is `center`. Every prefix of a longer sequence equals
/// the shorter one.
pub fn supporting_directions(center: Vec3, budget: usize) -> Vec<Vec3> {
    let c = center.normalized();
    let e1 = c.any_orthonormal();
    let e2 = c.cross(e1);
    // Additive recurrence with the plastic number (the 2D analogue of the golden ratio).
    let plastic = 1.324_717_957_244_746_f64;
    let (a1, a2) = (1.0 / plastic, 1.0 / (plastic * plastic));
    let mut out = Vec::with_capacity(budget);
    for k in 0..budget {
        let d = match k {
            0 => c,
            1 => -c,
            _ => {
                let j = (k - 1) as f64;
                let z = 1.0 - 2.0 * ((0.5 + j * a1).fract());
                let phi = core::f64::consts::TAU * (0.5 + j * a2).fract();
                let s = (1.0 - z * z).max(0.0).sqrt();
                c * z + (e1 * phi.cos() + e2 * phi.sin()) * s
            }
        };
        out.push(d);
    }
    out
}

/// Supporting shifted halfspaces of the sampled curve at curvature `h`,
/// one per usable direction among the first `budget`.
///
/// For a direction `c` the circle `{y·c = min_i y_i·c}` touches the samples
/// and leaves the cap around `−c` empty. The empty cap lies on one side of
/// the curve; `in_plus` decides which. The hull halfspace is co-oriented
/// away from the empty cap and carries curvature `h` when the empty cap is
/// in Ω⁻, `−h` when it is in Ω⁺.
pub fn supporting_circles<F>(
    samples: &[Vec3],
    center: Vec3,
    in_plus: F,
    h: f64,
    budget: usize,
) -> Result<Vec<SupportingCircle>>
where
    F: Fn(Vec3) -> bool,
{
    if !(h.abs() < 1.0) {
        return Err(Error::CurvatureOutOfRange { h, limit: 1.0 });
    }
    if samples.len() < 8 {
        return Err(Error::InvalidCurve("shifted hull needs at least 8 samples".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("hull budget must be at least 1".into()));
    }
    let mut out = Vec::new();
    for dir in supporting_directions(center, budget) {
        let min = samples.iter().map(|y| y.dot(dir)).fold(f64::INFINITY, f64::min);
        if min <= -1.0 + 1e-9 {
            continue;
        }
        let circle = IdealCircle::new(IdealPoint(dir), min.min(1.0).acos())?;
        let empty_cap_in_plus = in_plus(-dir);
        let hp = if empty_cap_in_plus { -h } else { h };
        let halfspace = ShiftedHalfspace::new(circle, hp, Orientation::Plus)?;
        out.push(SupportingCircle { halfspace, empty_cap_in_plus });
    }
    if out.is_empty() {
        return Err(Error::NoSupportingCircle);
    }
    Ok(out)
}

/// Minimum over supporting halfspaces of the signed hyperbolic distance
/// from `p` to the boundary leaf; negative means outside the sampled hull.
pub fn shifted_hull_margin<F>(
    samples: &[Vec3],
    center: Vec3,
    in_plus: F,
    h: f64,
    p: BallPoint,
    budget: usize,
) -> Result<f64>
where
    F: Fn(Vec3) -> bool,
{
    let circles = supporting_circles(samples, center, in_plus, h, budget)?;
    Ok(min_margin(&circles, p.coords()))
}

/// Minimum margin of `p` against precomputed supporting halfspaces.
pub fn min_margin(circles: &[SupportingCircle], p: Vec3) -> f64 {
    circles.iter().map(|s| s.halfspace.margin(p)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    fn equator(m: usize) -> Vec<Vec3> {
        (0..m)
            .map(|i| {
                let t = core::f64::consts::TAU * i as f64 / m as f64;
                Vec3::new(t.cos(), t.sin(), 0.0)
            })
            .collect()
    }

    #[test]
    fn equator_hull_is_the_plane() {
        let s = equator(64);
        let up = |y: Vec3| y.z > 0.0;
        let o = shifted_hull_margin(&s, Vec3::Z, up, 0.0, BallPoint::ORIGIN, 64).unwrap();
        assert!(o.abs() < 1e-12);
        let p = BallPoint::new(Vec3::new(0.0, 0.0, 0.9)).unwrap();
        let m = shifted_hull_margin(&s, Vec3::Z, up, 0.0, p, 64).unwrap();
        // Distance from (0,0,0.9) to the equatorial plane is 2 atanh 0.9.
        assert!((m + 2.0 * crate::math::atanh(0.9)).abs() < 1e-9);
    }

    #[test]
    fn directions_are_nested() {
        let a = supporting_directions(Vec3::new(0.3, 0.1, 0.9).normalized(), 64);
        let b = supporting_directions(Vec3::new(0.3, 0.1, 0.9).normalized(), 256);
        assert_eq!(&b[..64], &a[..]);
        for d in &b {
            assert!((d.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_describes_same_circle() {
        let c = IdealCircle::new(IdealPoint::new(Vec3::Z).unwrap(), 1.0).unwrap();
        let k = c.complement();
        let p = c.point(0.7);
        assert!((p.dot(k.axis()) - k.cos_radius()).abs() < 1e-15);
        assert!(IdealCircle::new(IdealPoint::new(Vec3::Z).unwrap(), FRAC_PI_2 * 2.0).is_err());
    }
}
