//! Closed-form ground truth: equidistant caps over round circles, and an
//! exact constant-curvature sandbox in the hyperbolic plane.

pub mod h2;

pub use h2::{
    crossing_pair, h2_arc, h2_exchange, h2_foliation_check, ArcPiece, ExchangeDecomposition, FoliationReport,
    H2Arc, H2Curve,
};

use crate::boundary::{osculating_collar_ring, IdealCurve, PlusSide};
use crate::error::{Error, Result};
use crate::geometry::IdealCircle;
use crate::mesh::{layout_for, place_on_cap, DiscreteSurface, Provenance};

/// Triangulated sample of the equidistant leaf of mean curvature `h` over
/// `circle` (co-oriented toward the axis cap), truncated at collar height
/// `eps`, with about `resolution` vertices. Every vertex lies on the leaf.
pub fn exact_cap(circle: &IdealCircle, h: f64, resolution: usize, eps: f64) -> Result<DiscreteSurface> {
    if !(h.abs() < 1.0) {
        return Err(Error::CurvatureOutOfRange { h, limit: 1.0 });
    }
    let curve = IdealCurve::round(
        crate::geometry::IdealPoint::new(circle.axis())?,
        circle.radius(),
        PlusSide::Inside,
    )?;
    exact_cap_for(&curve, h, resolution, eps)
}

/// [`exact_cap`] for a round [`IdealCurve`], reusing its orientation and the
/// solver's layout.
pub fn exact_cap_for(curve: &IdealCurve, h: f64, resolution: usize, eps: f64) -> Result<DiscreteSurface> {
    if curve.order() != 0 || curve.dilation() != 1.0 {
        return Err(Error::InvalidCurve("exact caps exist only for undilated round circles".into()));
    }
    let layout = layout_for(curve, eps, resolution)?;
    let ring = osculating_collar_ring(curve, h, eps, layout.boundary_size())?;
    let ring: alloc::vec::Vec<_> = ring.into_iter().map(|p| p.coords()).collect();
    place_on_cap(&layout, curve, h, eps, &ring, Provenance::Exact)
}
