//! Triangulated disks in ball coordinates and the concentric ring layout
//! shared by every leaf of a sweep.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::boundary::IdealCurve;
use crate::error::{Error, Result};
use crate::geometry::{equidistant_leaf, IdealCircle, Orientation};
use crate::math::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Provenance {
    Initial,
    Solved,
    Exact,
}

/// Triangulated disk with a pinned boundary ring. The winding normal
/// `(b − a) × (c − a)` is the co-orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSurface {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary cycle, in order.
    pub boundary: Vec<usize>,
    pub h: f64,
    pub eps: f64,
    pub provenance: Provenance,
}

/// Summary of a successful mesh audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshAudit {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
}

impl DiscreteSurface {
    /// Flags pinned vertices.
    pub fn pinned_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for &b in &self.boundary {
            mask[b] = true;
        }
        mask
    }

    pub fn reverse_winding(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
        self.boundary.reverse();
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Checks that the mesh is a consistently wound disk whose boundary
    /// cycle is `boundary`, and that every vertex respects the truncation.
    pub fn audit(&self) -> Result<MeshAudit> {
        let nv = self.vertices.len();
        let bad = |msg: alloc::string::String| Err(Error::InvalidMesh(msg));
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.is_finite() || v.norm() > 1.0 - 0.25 * self.eps {
                return bad(alloc::format!("vertex {i} violates |p| ≤ 1 − ε/4 (|p| = {})", v.norm()));
            }
        }
        // Directed edge → number of uses; an interior edge must appear once in
        // each direction, a boundary edge once in total.
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= nv) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return bad(alloc::format!("triangle {k} is degenerate or out of range"));
            }
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *directed.entry((a, b)).or_insert(0) += 1;
            }
        }
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        let mut edges = 0usize;
        for (&(a, b), &n) in &directed {
            if n > 1 {
                return bad(alloc::format!("directed edge ({a}, {b}) used {n} times: inconsistent winding"));
            }
            match directed.get(&(b, a)) {
                Some(_) => {
                    if a < b {
                        edges += 1;
                    }
                }
                None => {
                    edges += 1;
                    if next.insert(a, b).is_some() {
                        return bad(alloc::format!("vertex {a} has two outgoing boundary edges"));
                    }
                }
            }
        }
        // Walk the boundary cycle.
        let Some(&start) = self.boundary.first() else {
            return bad("empty boundary ring".into());
        };
        let mut cycle = Vec::with_capacity(next.len());
        let mut cur = start;
        loop {
            cycle.push(cur);
            cur = match next.get(&cur) {
                Some(&n) => n,
                None => return bad(alloc::format!("boundary ring vertex {cur} is not on the mesh boundary")),
            };
            if cur == start || cycle.len() > next.len() {
                break;
            }
        }
        if cycle.len() != next.len() || cycle != self.boundary {
            return bad("boundary edges do not form the declared boundary cycle".into());
        }
        let euler = nv as i64 - edges as i64 + self.triangles.len() as i64;
        if euler != 1 {
            return bad(alloc::format!("Euler characteristic {euler}, expected 1 for a disk"));
        }
        Ok(MeshAudit { vertices: nv, edges, faces: self.triangles.len(), euler })
    }
}

/// Concentric-ring combinatorics: a center vertex, then rings of
/// nondecreasing size, the last of which is the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct RingLayout {
    /// Vertices per ring; ring 0 is the center.
    pub counts: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
}

impl RingLayout {
    /// Builds the layout with rings `j = 1..=rings` of sizes given by `count(j)`.
    pub fn from_counts(counts: Vec<usize>) -> Result<RingLayout> {
        if counts.len() < 2 || counts[0] != 1 || counts[1..].iter().any(|&n| n < 3) {
            return Err(Error::InvalidMesh("ring layout needs a center and rings of ≥ 3 vertices".into()));
        }
        let mut triangles = Vec::new();
        let mut offset = 1;
        // Center fan.
        let n1 = counts[1];
        for k in 0..n1 {
            triangles.push([0, offset + k, offset + (k + 1) % n1]);
        }
        for j in 1..counts.len() - 1 {
            let (na, nb) = (counts[j], counts[j + 1]);
            let (oa, ob) = (offset, offset + na);
            let (mut i, mut k) = (0usize, 0usize);
            while i < na || k < nb {
                // Advance whichever ring has the smaller next azimuth.
                let ta = (i + 1) as f64 / na as f64;
                let tb = (k + 1) as f64 / nb as f64;
                let advance_b = k < nb && (i == na || tb <= ta);
                if advance_b {
                    triangles.push([oa + i % na, ob + k, ob + (k + 1) % nb]);
                    k += 1;
                } else {
                    triangles.push([oa + i, ob + k % nb, oa + (i + 1) % na]);
                    i += 1;
                }
            }
            offset += na;
        }
        Ok(RingLayout { counts, triangles })
    }

    /// Layout with `m` boundary vertices, graded uniformly in hyperbolic arc
    /// length over a geodesic disk of radius `sigma_max`: ring `j` has a
    /// vertex count proportional to its circumference `2π sinh σⱼ`.
    pub fn graded(m: usize, sigma_max: f64) -> Result<RingLayout> {
        if m < 8 || !(sigma_max > 0.0) {
            return Err(Error::InvalidArgument("layout needs m ≥ 8 and a positive radius".into()));
        }
        let spacing = TAU * sigma_max.sinh() / m as f64;
        let rings = ((sigma_max / spacing).round() as usize).max(2);
        let mut counts = vec![1usize];
        let mut last = 0usize;
        for j in 1..=rings {
            let s = sigma_max * j as f64 / rings as f64;
            let n = if j == rings {
                m
            } else {
                ((TAU * s.sinh() / spacing).round() as usize).clamp(6, m)
            };
            let n = n.max(last);
            counts.push(n);
            last = n;
        }
        Self::from_counts(counts)
    }

    /// Graded layout whose total vertex count is close to `target`.
    pub fn for_resolution(target: usize, sigma_max: f64, min_boundary: usize) -> Result<RingLayout> {
        // Vertex count grows like m²; bisect on m.
        let (mut lo, mut hi) = (min_boundary.max(8), min_boundary.max(8));
        while Self::graded(hi, sigma_max)?.vertex_count() < target {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if Self::graded(mid, sigma_max)?.vertex_count() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::graded(hi, sigma_max)
    }

    #[inline]
    pub fn rings(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.counts.iter().sum()
    }

    #[inline]
    pub fn boundary_size(&self) -> usize {
        *self.counts.last().unwrap()
    }

    pub fn boundary(&self) -> Vec<usize> {
        let n = self.vertex_count();
        (n - self.boundary_size()..n).collect()
    }

    /// `(ring fraction j/rings, azimuth)` of every vertex in index order.
    pub fn parameters(&self) -> Vec<(f64, f64)> {
        let rings = self.rings() as f64;
        let mut out = Vec::with_capacity(self.vertex_count());
        for (j, &n) in self.counts.iter().enumerate() {
            for k in 0..n {
                out.push((j as f64 / rings, TAU * k as f64 / n as f64));
            }
        }
        out
    }
}

/// Point of the round `H`-cap over the planar circle of radius `r0` in
/// half-space coordinates, reached from the `H = 0` hemisphere by moving a
/// signed hyperbolic distance `d` (positive: away from the dome interior)
/// along the normal geodesic through the hemisphere point at arc length
/// `sigma0` from its top. Returns `(horizontal radius, height)`.
pub fn cap_point(r0: f64, d: f64, sigma0: f64) -> (f64, f64) {
    if sigma0 <= 0.0 {
        return (0.0, r0 * d.exp());
    }
    let sb = sigma0.tanh();
    let cb = (1.0 - sb * sb).sqrt();
    let cot = cb / sb;
    let u = (sb / (1.0 + cb)).recip() * (-d).exp();
    let (sp, cp) = (2.0 * u / (1.0 + u * u), (1.0 - u * u) / (1.0 + u * u));
    (r0 / sb + r0 * cot * cp, r0 * cot * sp)
}

/// Hemisphere arc length at which the mapped cap point reaches height `z`.
pub fn cap_sigma_at_height(r0: f64, d: f64, z: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while cap_point(r0, d, hi).1 > z {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cap_point(r0, d, mid).1 > z {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Signed normal offset of the `H`-leaf from the `H = 0` leaf of a round
/// circle, measured away from the dome interior.
#[inline]
pub fn cap_offset(curve: &IdealCurve, h: f64) -> f64 {
    curve.plus_side().sign() * crate::math::atanh(h)
}

/// Round circle matching a curve: same star center, planar radius equal to
/// the RMS of `r(θ)` over `m` samples.
pub fn rms_radius(curve: &IdealCurve, m: usize) -> f64 {
    let s: f64 = (0..m).map(|i| curve.planar_radius(TAU * i as f64 / m as f64).powi(2)).sum();
    (s / m as f64).sqrt()
}

/// The layout used for every leaf over `curve`: graded over the `H = 0`
/// cap of the RMS circle truncated at height `eps`, about `resolution`
/// vertices, with enough boundary samples for the profile's harmonics.
pub fn layout_for(curve: &IdealCurve, eps: f64, resolution: usize) -> Result<RingLayout> {
    let r0 = rms_radius(curve, 256.max(16 * curve.order()));
    let sigma_max = cap_sigma_at_height(r0, 0.0, eps);
    RingLayout::for_resolution(resolution, sigma_max, (8 * curve.order()).max(16))
}

/// Places `layout` on the round `H`-cap of the RMS circle of `curve`, with
/// the boundary ring at `ring` (ball coordinates, one per boundary vertex)
/// and each meridian stretched horizontally so that it ends at its ring
/// point. Winding is fixed so that the co-orientation points into Ω⁺.
pub fn place_on_cap(
    layout: &RingLayout,
    curve: &IdealCurve,
    h: f64,
    eps: f64,
    ring: &[Vec3],
    provenance: Provenance,
) -> Result<DiscreteSurface> {
    let m = layout.boundary_size();
    if ring.len() != m {
        return Err(Error::InvalidMesh("collar ring size does not match the layout".into()));
    }
    let frame = curve.frame();
    let r0 = rms_radius(curve, 256.max(16 * curve.order()));
    let d = cap_offset(curve, h);
    let sigma_max = cap_sigma_at_height(r0, d, eps);
    let rim = cap_point(r0, d, sigma_max).0;
    // Horizontal stretch per boundary azimuth, interpolated in between.
    let ring_half: Vec<Vec3> = ring.iter().map(|&x| frame.ball_to_half(x)).collect();
    let stretch: Vec<f64> = ring_half.iter().map(|q| (q.x * q.x + q.y * q.y).sqrt() / rim).collect();
    let stretch_at = |theta: f64| {
        let u = theta / TAU * m as f64;
        let i = u.floor() as usize % m;
        let f = u - u.floor();
        stretch[i] * (1.0 - f) + stretch[(i + 1) % m] * f
    };
    let params = layout.parameters();
    let nv = params.len();
    let mut vertices = Vec::with_capacity(nv);
    for &(frac, theta) in &params[..nv - m] {
        let (rho, z) = cap_point(r0, d, frac * sigma_max);
        let rho = rho * stretch_at(theta);
        vertices.push(frame.half_to_ball(Vec3::new(rho * theta.cos(), rho * theta.sin(), z)));
    }
    vertices.extend_from_slice(ring);
    let mut surface = DiscreteSurface {
        vertices,
        triangles: layout.triangles.clone(),
        boundary: layout.boundary(),
        h,
        eps,
        provenance,
    };
    // Compare the winding normal at the center fan with the Ω⁺ side of the
    // round leaf.
    let side = match curve.plus_side() {
        crate::boundary::PlusSide::Inside => Orientation::Plus,
        crate::boundary::PlusSide::Outside => Orientation::Minus,
    };
    let circle = IdealCircle::new(curve.center(), 2.0 * r0.atan())?;
    let leaf = equidistant_leaf(&circle, h, side)?;
    let t = surface.triangles[0];
    let [a, b, c] = t.map(|i| surface.vertices[i]);
    let n = (b - a).cross(c - a);
    if n.dot(leaf.unit_normal((a + b + c) / 3.0)) < 0.0 {
        surface.reverse_winding();
        // Keep the boundary cycle starting at the first ring vertex.
        surface.boundary.rotate_right(1);
    }
    Ok(surface)
}
