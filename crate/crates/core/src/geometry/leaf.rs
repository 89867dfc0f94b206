//! Canonical constant-mean-curvature surfaces of the ball model.
//!
//! Every totally umbilic surface of the ball is carried by a Euclidean sphere
//! or plane. We keep it as a *generalized sphere*
//! `G(x) = A|x|² − 2 B·x + D`, normalized so that `|B|² − A·D = 1` and
//! oriented so that the co-orientation points into `{G > 0}`. In that form
//!
//! * the hyperbolic mean curvature is `(D − A) / 2`,
//! * the signed Euclidean distance to the carrier is `G(x) / (1 + |A x − B|)`,
//! * for `|H| < 1` the signed hyperbolic distance to the leaf is
//!   `asinh(ψ) + atanh(H)` with `ψ = (G(x)/(1 − |x|²) − H) / √(1 − H²)`.
//!
//! Mean curvature is positive when the mean curvature vector points to the
//! positive side.

use super::hull::IdealCircle;
use super::{BallPoint, IdealPoint, PREDICATE_TOL};
use crate::error::{Error, Result};
use crate::math::{atanh, Vec3};
#[allow(unused_imports)]
use num_traits::Float;

/// Normalized generalized sphere `A|x|² − 2B·x + D` with `|B|² − AD = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenSphere {
    pub a: f64,
    pub b: Vec3,
    pub d: f64,
}

impl GenSphere {
    /// Normalizes raw coefficients; fails for imaginary or degenerate spheres.
    pub fn normalized(a: f64, b: Vec3, d: f64) -> Result<GenSphere> {
        let q = b.norm2() - a * d;
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidArgument("degenerate generalized sphere".into()));
        }
        let s = 1.0 / q.sqrt();
        Ok(GenSphere { a: a * s, b: b * s, d: d * s })
    }

    #[inline]
    pub fn eval(&self, x: Vec3) -> f64 {
        self.a * x.norm2() - 2.0 * self.b.dot(x) + self.d
    }

    #[inline]
    pub fn gradient(&self, x: Vec3) -> Vec3 {
        (x * self.a - self.b) * 2.0
    }

    #[inline]
    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.d - self.a)
    }

    #[inline]
    pub fn signed_euclidean_distance(&self, x: Vec3) -> f64 {
        self.eval(x) / (1.0 + (x * self.a - self.b).norm())
    }

    /// Signed hyperbolic distance to the surface; only for `|H| < 1`.
    pub fn signed_hyperbolic_distance(&self, x: Vec3) -> Option<f64> {
        let h = self.mean_curvature();
        if !(h.abs() < 1.0) {
            return None;
        }
        let w = 1.0 - x.norm2();
        let psi = (self.eval(x) / w - h) / (1.0 - h * h).sqrt();
        Some(psi.asinh() + atanh(h))
    }

    #[inline]
    pub fn flipped(&self) -> GenSphere {
        GenSphere { a: -self.a, b: -self.b, d: -self.d }
    }
}

/// Euclidean carrier of a leaf in ball coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Carrier {
    Sphere { center: Vec3, radius: f64 },
    /// `{x : normal · x = offset}` with a unit normal.
    Plane { normal: Vec3, offset: f64 },
}

/// Co-orientation relative to the carrier: `Plus` is the outward normal of a
/// sphere or the stored normal of a plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Plus => 1.0,
            Orientation::Minus => -1.0,
        }
    }

    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::Plus => Orientation::Minus,
            Orientation::Minus => Orientation::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LeafKind {
    GeodesicPlane,
    Equidistant,
    Horosphere,
    GeodesicSphere,
}

/// Result of a side predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
    On,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CanonicalLeaf {
    pub kind: LeafKind,
    pub carrier: Carrier,
    pub orientation: Orientation,
    pub mean_curvature: f64,
    gen: GenSphere,
}

impl CanonicalLeaf {
    /// Builds a leaf from an oriented carrier, classifying its kind.
    pub fn from_carrier(carrier: Carrier, orientation: Orientation) -> Result<CanonicalLeaf> {
        let gen = match carrier {
            Carrier::Sphere { center, radius } => {
                if !(radius > 0.0) {
                    return Err(Error::InvalidArgument("sphere radius must be positive".into()));
                }
                let k = 1.0 / radius;
                GenSphere { a: k, b: center * k, d: (center.norm2() - radius * radius) * k }
            }
            Carrier::Plane { normal, offset } => {
                let n = normal.normalized();
                GenSphere { a: 0.0, b: -n, d: -2.0 * offset }
            }
        };
        let gen = if orientation == Orientation::Minus { gen.flipped() } else { gen };
        Self::from_gen(gen)
    }

    /// Builds a leaf whose co-orientation points into `{G > 0}`.
    pub fn from_gen(gen: GenSphere) -> Result<CanonicalLeaf> {
        let (carrier, orientation) = carrier_of(&gen);
        let h = gen.mean_curvature();
        let kind = match carrier {
            Carrier::Plane { offset, .. } => {
                if offset.abs() >= 1.0 {
                    return Err(Error::InvalidArgument("plane misses the ball".into()));
                }
                if offset.abs() <= PREDICATE_TOL {
                    LeafKind::GeodesicPlane
                } else {
                    LeafKind::Equidistant
                }
            }
            Carrier::Sphere { center, radius } => {
                let reach = center.norm() + radius;
                if (reach - 1.0).abs() <= PREDICATE_TOL {
                    LeafKind::Horosphere
                } else if reach < 1.0 {
                    LeafKind::GeodesicSphere
                } else if center.norm() - radius >= 1.0 || radius - center.norm() >= 1.0 {
                    return Err(Error::InvalidArgument("sphere misses the ball".into()));
                } else if h.abs() <= PREDICATE_TOL {
                    LeafKind::GeodesicPlane
                } else {
                    LeafKind::Equidistant
                }
            }
        };
        let mean_curvature = match kind {
            LeafKind::GeodesicPlane => 0.0,
            LeafKind::Horosphere => h.signum(),
            _ => h,
        };
        Ok(CanonicalLeaf { kind, carrier, orientation, mean_curvature, gen })
    }

    /// Horosphere tangent to the ideal boundary at `at` with Euclidean radius `radius`.
    pub fn horosphere(at: IdealPoint, radius: f64, orientation: Orientation) -> Result<CanonicalLeaf> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidArgument("horosphere radius must lie in (0, 1)".into()));
        }
        let center = at.coords() * (1.0 - radius);
        Self::from_carrier(Carrier::Sphere { center, radius }, orientation)
    }

    /// Geodesic sphere of hyperbolic radius `radius` about `center`.
    pub fn geodesic_sphere(center: BallPoint, radius: f64, orientation: Orientation) -> Result<CanonicalLeaf> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("geodesic sphere radius must be positive".into()));
        }
        let p = center.coords();
        let t = (0.5 * radius).tanh();
        let p2 = p.norm2();
        let denom = 1.0 - p2 * t * t;
        let c = p * ((1.0 - t * t) / denom);
        let r = t * (1.0 - p2) / denom;
        Self::from_carrier(Carrier::Sphere { center: c, radius: r }, orientation)
    }

    #[inline]
    pub fn gen(&self) -> &GenSphere {
        &self.gen
    }

    /// Same carrier with the opposite co-orientation.
    pub fn reversed(&self) -> CanonicalLeaf {
        Self::from_gen(self.gen.flipped()).expect("reversal keeps a valid leaf")
    }

    /// Signed Euclidean distance, positive on the co-oriented side.
    #[inline]
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.gen.signed_euclidean_distance(p)
    }

    /// Signed hyperbolic distance for leaves with `|H| < 1`.
    pub fn signed_hyperbolic_distance(&self, p: BallPoint) -> Option<f64> {
        match self.kind {
            LeafKind::GeodesicPlane | LeafKind::Equidistant => {
                self.gen.signed_hyperbolic_distance(p.coords())
            }
            _ => None,
        }
    }

    /// Euclidean unit co-normal at a point of the carrier.
    pub fn unit_normal(&self, p: Vec3) -> Vec3 {
        self.gen.gradient(p).normalized()
    }
}

fn carrier_of(gen: &GenSphere) -> (Carrier, Orientation) {
    // Carriers flatter than radius 1e12 are reported as planes; predicates go
    // through the generalized form anyway.
    if gen.a.abs() < 1e-12 {
        let n = -gen.b;
        let len = n.norm();
        (Carrier::Plane { normal: n / len, offset: -gen.d / (2.0 * len) }, Orientation::Plus)
    } else {
        let center = gen.b / gen.a;
        let radius = 1.0 / gen.a.abs();
        let o = if gen.a > 0.0 { Orientation::Plus } else { Orientation::Minus };
        (Carrier::Sphere { center, radius }, o)
    }
}

/// Exact mean curvature of a leaf with respect to its stored co-orientation.
pub fn mean_curvature_of(leaf: &CanonicalLeaf) -> f64 {
    leaf.gen.mean_curvature()
}

/// The unique leaf of mean curvature `h` asymptotic to `circle`, co-oriented
/// toward the `side` cap (`Plus` = the cap containing the circle's axis).
///
/// Within the pencil `2(x·c − cos α) − w(|x|² − 1)` of spheres through the
/// circle, the mean curvature toward the axis cap is
/// `(w − cos α)/√(1 − 2w cos α + w²)`; inverting gives
/// `w = cos α + h sin α / √(1 − h²)`. The carrier meets the unit sphere at
/// an angle whose cosine is `|h|`.
pub fn equidistant_leaf(circle: &IdealCircle, h: f64, side: Orientation) -> Result<CanonicalLeaf> {
    if !(h.abs() < 1.0) {
        return Err(Error::CurvatureOutOfRange { h, limit: 1.0 });
    }
    let circle = match side {
        Orientation::Plus => *circle,
        Orientation::Minus => circle.complement(),
    };
    let (c, ca, sa) = (circle.axis(), circle.cos_radius(), circle.sin_radius());
    let w = ca + h * sa / (1.0 - h * h).sqrt();
    let gen = GenSphere::normalized(-w, -c, w - 2.0 * ca)?;
    let mut leaf = CanonicalLeaf::from_gen(gen)?;
    // Keep the requested curvature bit-exact; the pencil formula reproduces it to rounding.
    leaf.mean_curvature = if leaf.kind == LeafKind::GeodesicPlane { 0.0 } else { h };
    if h == 0.0 {
        leaf.kind = LeafKind::GeodesicPlane;
    } else if leaf.kind == LeafKind::GeodesicPlane {
        leaf.kind = LeafKind::Equidistant;
        leaf.mean_curvature = h;
    }
    Ok(leaf)
}

/// Classifies `p` against the leaf by signed Euclidean distance.
pub fn side_of(leaf: &CanonicalLeaf, p: Vec3, tol: f64) -> Side {
    let d = leaf.signed_distance(p);
    if d > tol {
        Side::Positive
    } else if d < -tol {
        Side::Negative
    } else {
        Side::On
    }
}
