//! Discrete `I_H = A + 2·H·V` and its exact gradient.
//!
//! Area uses the conformal factor squared at the three edge midpoints of
//! each triangle. Volume is a flux: the field `F(|x|)·x` with
//! `F(r) = G(r)/r³`, `G(r) = r(1 + r²)/(1 − r²)² − atanh r`, has divergence
//! `λ³`, so the hyperbolic volume between `S` and a reference `M` with the
//! same boundary is `Φ(S) − Φ(M)`. On a flat triangle `x·n` is constant and
//! the flux is `det(a, b, c)/6` times the sum of `F` at the edge midpoints.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{det3, Vec3};
use crate::mesh::{DiscreteSurface, Provenance};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyBreakdown {
    /// Hyperbolic area.
    pub area: f64,
    /// Signed hyperbolic volume between the surface and the reference.
    pub volume: f64,
    /// `area + 2·H·volume`.
    pub energy: f64,
}

#[inline]
fn lambda2(x: Vec3) -> f64 {
    let w = 1.0 - x.norm2();
    4.0 / (w * w)
}

/// Radial profile of the volume flux field and its derivative.
pub(crate) fn flux_profile(r: f64) -> (f64, f64) {
    if r < 0.25 {
        // F = 8 Σ C(k+2, 2) r^{2k}/(2k + 3).
        let r2 = r * r;
        let (mut f, mut df, mut p) = (0.0, 0.0, 1.0);
        for k in 0..40 {
            let kf = k as f64;
            let c = 0.5 * (kf + 1.0) * (kf + 2.0) / (2.0 * kf + 3.0);
            f += c * p;
            if k > 0 {
                df += c * 2.0 * kf * p / r;
            }
            p *= r2;
            if p < 1e-18 {
                break;
            }
        }
        (8.0 * f, 8.0 * df)
    } else {
        let w = 1.0 - r * r;
        let g = r * (1.0 + r * r) / (w * w) - crate::math::atanh(r);
        let f = g / (r * r * r);
        let l3 = 8.0 / (w * w * w);
        (f, (l3 - 3.0 * f) / r)
    }
}

#[inline]
fn triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let n = (b - a).cross(c - a);
    let w = (lambda2((a + b) * 0.5) + lambda2((b + c) * 0.5) + lambda2((c + a) * 0.5)) / 3.0;
    0.5 * n.norm() * w
}

#[inline]
fn triangle_flux(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let s = flux_profile(((a + b) * 0.5).norm()).0
        + flux_profile(((b + c) * 0.5).norm()).0
        + flux_profile(((c + a) * 0.5).norm()).0;
    det3(a, b, c) * s / 6.0
}

/// Hyperbolic area of one triangle.
pub fn hyperbolic_triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    triangle_area(a, b, c)
}

/// Hyperbolic area of the whole surface.
pub fn surface_area(s: &DiscreteSurface) -> f64 {
    s.triangles.iter().map(|t| triangle_area(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]])).sum()
}

/// Oriented volume flux `Φ(S)`.
pub fn surface_flux(s: &DiscreteSurface) -> f64 {
    s.triangles.iter().map(|t| triangle_flux(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]])).sum()
}

/// Cone from `apex` over the boundary ring of `s`, with the same boundary
/// orientation: the default reference surface.
pub fn cone_reference(s: &DiscreteSurface, apex: Vec3) -> DiscreteSurface {
    let m = s.boundary.len();
    let mut vertices = vec![apex];
    vertices.extend(s.boundary.iter().map(|&i| s.vertices[i]));
    let triangles = (0..m).map(|i| [1 + i, 1 + (i + 1) % m, 0]).collect();
    DiscreteSurface {
        vertices,
        triangles,
        boundary: (1..=m).collect(),
        h: s.h,
        eps: s.eps,
        provenance: Provenance::Initial,
    }
}

fn check_reference(s: &DiscreteSurface, m: &DiscreteSurface) -> Result<()> {
    let same = s.boundary.len() == m.boundary.len()
        && s.boundary.iter().zip(&m.boundary).all(|(&i, &j)| (s.vertices[i] - m.vertices[j]).norm() <= 1e-12);
    if same {
        Ok(())
    } else {
        Err(Error::InvalidMesh("reference surface has a different boundary ring".into()))
    }
}

/// Area, volume relative to `reference`, and `I = A + 2HV`.
pub fn energy(s: &DiscreteSurface, h: f64, reference: &DiscreteSurface) -> Result<EnergyBreakdown> {
    check_reference(s, reference)?;
    Ok(energy_with_flux(s, h, surface_flux(reference)))
}

/// [`energy`] with the reference flux precomputed.
pub fn energy_with_flux(s: &DiscreteSurface, h: f64, reference_flux: f64) -> EnergyBreakdown {
    let area = surface_area(s);
    let volume = surface_flux(s) - reference_flux;
    EnergyBreakdown { area, volume, energy: area + 2.0 * h * volume }
}

/// Per-vertex gradients of area and volume (boundary rows included).
pub fn area_volume_gradients(s: &DiscreteSurface) -> (Vec<Vec3>, Vec<Vec3>) {
    let n = s.vertices.len();
    let mut ga = vec![Vec3::ZERO; n];
    let mut gv = vec![Vec3::ZERO; n];
    for t in &s.triangles {
        let [ia, ib, ic] = *t;
        let (a, b, c) = (s.vertices[ia], s.vertices[ib], s.vertices[ic]);
        // Area: ½|N|·W with W the mean of λ² at edge midpoints.
        let nvec = (b - a).cross(c - a);
        let nn = nvec.norm();
        let mids = [(a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5];
        let l2: [f64; 3] = mids.map(lambda2);
        let w = (l2[0] + l2[1] + l2[2]) / 3.0;
        let half_area = 0.5 * nn;
        // d(λ²)/dm = 2λ³ m; each midpoint moves by half of an endpoint's motion.
        let dl2 = |m: Vec3, l2m: f64| m * (2.0 * l2m * l2m.sqrt() / 3.0 * 0.5);
        let d_ab = dl2(mids[0], l2[0]);
        let d_bc = dl2(mids[1], l2[1]);
        let d_ca = dl2(mids[2], l2[2]);
        if nn > 0.0 {
            let nh = nvec / nn;
            ga[ia] += nh.cross(c - b) * (0.5 * w);
            ga[ib] += nh.cross(a - c) * (0.5 * w);
            ga[ic] += nh.cross(b - a) * (0.5 * w);
        }
        ga[ia] += (d_ab + d_ca) * half_area;
        ga[ib] += (d_ab + d_bc) * half_area;
        ga[ic] += (d_bc + d_ca) * half_area;
        // Flux: det(a, b, c)·ΣF(|m|)/6.
        let prof = mids.map(|m| {
            let r = m.norm();
            let (f, df) = flux_profile(r);
            (f, if r > 0.0 { m * (0.5 * df / r) } else { Vec3::ZERO })
        });
        let sum_f = prof[0].0 + prof[1].0 + prof[2].0;
        let det = det3(a, b, c);
        gv[ia] += b.cross(c) * (sum_f / 6.0) + (prof[0].1 + prof[2].1) * (det / 6.0);
        gv[ib] += c.cross(a) * (sum_f / 6.0) + (prof[0].1 + prof[1].1) * (det / 6.0);
        gv[ic] += a.cross(b) * (sum_f / 6.0) + (prof[1].1 + prof[2].1) * (det / 6.0);
    }
    (ga, gv)
}

/// Exact gradient of the discrete `I_H`; pinned rows are zero. The
/// reference surface contributes a constant and drops out.
pub fn energy_gradient(s: &DiscreteSurface, h: f64) -> Vec<Vec3> {
    let (ga, gv) = area_volume_gradients(s);
    let pinned = s.pinned_mask();
    ga.iter()
        .zip(&gv)
        .zip(&pinned)
        .map(|((&a, &v), &p)| if p { Vec3::ZERO } else { a + v * (2.0 * h) })
        .collect()
}

/// Area-weighted unit vertex normals along the winding orientation.
pub fn vertex_normals(s: &DiscreteSurface) -> Vec<Vec3> {
    let mut n = vec![Vec3::ZERO; s.vertices.len()];
    for t in &s.triangles {
        let [a, b, c] = t.map(|i| s.vertices[i]);
        let f = (b - a).cross(c - a);
        for &i in t {
            n[i] += f;
        }
    }
    n.into_iter().map(|v| v.normalized()).collect()
}

/// Order statistics of per-vertex residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualStats {
    pub median: f64,
    pub p90: f64,
    pub max: f64,
    pub count: usize,
}

impl ResidualStats {
    pub fn from_values(mut v: Vec<f64>) -> ResidualStats {
        if v.is_empty() {
            return ResidualStats { median: 0.0, p90: 0.0, max: 0.0, count: 0 };
        }
        v.sort_by(f64::total_cmp);
        let q = |f: f64| v[((v.len() - 1) as f64 * f).round() as usize];
        ResidualStats { median: q(0.5), p90: q(0.9), max: v[v.len() - 1], count: v.len() }
    }
}

/// Per-interior-vertex mean-curvature residual: the normal component of
/// `∇A + 2H∇V` divided by twice the vertex's hyperbolic area times `λ`,
/// i.e. the local deviation of the discrete mean curvature from `H`.
pub fn vertex_residuals(s: &DiscreteSurface, h: f64) -> Vec<f64> {
    let (ga, gv) = area_volume_gradients(s);
    let normals = vertex_normals(s);
    let mut varea = vec![0.0; s.vertices.len()];
    for t in &s.triangles {
        let [a, b, c] = t.map(|i| s.vertices[i]);
        let share = triangle_area(a, b, c) / 3.0;
        for &i in t {
            varea[i] += share;
        }
    }
    let pinned = s.pinned_mask();
    (0..s.vertices.len())
        .filter(|&i| !pinned[i])
        .map(|i| {
            let nu = normals[i];
            let lam = crate::geometry::lambda(s.vertices[i]);
            (ga[i].dot(nu) + 2.0 * h * gv[i].dot(nu)).abs() / (2.0 * lam * varea[i])
        })
        .collect()
}

/// Median, 90th percentile and maximum of [`vertex_residuals`].
pub fn mean_curvature_residual(s: &DiscreteSurface, h: f64) -> ResidualStats {
    ResidualStats::from_values(vertex_residuals(s, h))
}

/// Hyperbolic dual norm `√Σ(|gᵢ|/λᵢ)²` of a gradient.
pub fn gradient_norm(s: &DiscreteSurface, g: &[Vec3]) -> f64 {
    g.iter()
        .zip(&s.vertices)
        .map(|(gi, x)| {
            let l = crate::geometry::lambda(*x);
            gi.norm2() / (l * l)
        })
        .sum::<f64>()
        .sqrt()
}

/// [`gradient_norm`] of the components along the vertex normals only;
/// tangential components merely reparametrize the surface.
pub fn normal_gradient_norm(s: &DiscreteSurface, g: &[Vec3]) -> f64 {
    let normals = vertex_normals(s);
    g.iter()
        .zip(&s.vertices)
        .zip(&normals)
        .map(|((gi, x), n)| {
            let l = crate::geometry::lambda(*x);
            gi.dot(*n).powi(2) / (l * l)
        })
        .sum::<f64>()
        .sqrt()
}
