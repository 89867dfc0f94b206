//! Constant-curvature curves in the Poincaré disk.
//!
//! The hyperbolic plane is the unit disk with metric `4|dx|²/(1 − |x|²)²`.
//! Circles and lines are generalized circles `A|x|² − 2B·x + D`, normalized
//! to `|B|² − AD = 1` and co-oriented into `{G > 0}`; the geodesic
//! curvature toward that side is `(D − A)/2`, exactly as for spheres in the
//! ball. A curve traveled from `p` to `q` is co-oriented to its left.
//!
//! The energy of a curve is `I_k = L + k·|Ω|`, where `Ω` is the region on the
//! right (negative) side; with that choice a curve of constant curvature `k`
//! is critical for `I_k`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::adaptive_simpson;
#[allow(unused_imports)]
use num_traits::Float;

pub type P2 = [f64; 2];

#[inline]
fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
#[inline]
fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}
#[inline]
fn add(a: P2, b: P2) -> P2 {
    [a[0] + b[0], a[1] + b[1]]
}
#[inline]
fn scale(a: P2, s: f64) -> P2 {
    [a[0] * s, a[1] * s]
}
#[inline]
fn norm(a: P2) -> f64 {
    dot(a, a).sqrt()
}
/// Rotation by +90°.
#[inline]
fn perp(a: P2) -> P2 {
    [-a[1], a[0]]
}

/// Normalized generalized circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gen2 {
    pub a: f64,
    pub b: P2,
    pub d: f64,
}

impl Gen2 {
    fn normalized(a: f64, b: P2, d: f64) -> Result<Gen2> {
        let q = dot(b, b) - a * d;
        if !(q > 0.0) {
            return Err(Error::InvalidArgument("degenerate generalized circle".into()));
        }
        let s = 1.0 / q.sqrt();
        Ok(Gen2 { a: a * s, b: scale(b, s), d: d * s })
    }

    #[inline]
    pub fn eval(&self, x: P2) -> f64 {
        self.a * dot(x, x) - 2.0 * dot(self.b, x) + self.d
    }

    #[inline]
    pub fn curvature(&self) -> f64 {
        0.5 * (self.d - self.a)
    }

    /// Unit co-normal at `x`.
    pub fn normal(&self, x: P2) -> P2 {
        let g = sub(scale(x, self.a), self.b);
        scale(g, 1.0 / norm(g))
    }
}

/// Euclidean carrier of a sandbox curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Carrier2 {
    Circle { center: P2, radius: f64 },
    Line { point: P2, direction: P2 },
}

/// A circular arc or segment traveled from `start` to `end`, co-oriented to
/// its left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPiece {
    pub gen: Gen2,
    pub start: P2,
    pub end: P2,
    carrier: Carrier2,
    /// Start angle and signed sweep for circles.
    phi0: f64,
    sweep: f64,
}

/// Carriers flatter than this are treated as lines.
const FLAT: f64 = 1e-12;

impl ArcPiece {
    fn new(gen: Gen2, start: P2, end: P2) -> ArcPiece {
        if gen.a.abs() < FLAT {
            let dir = sub(end, start);
            ArcPiece { gen, start, end, carrier: Carrier2::Line { point: start, direction: dir }, phi0: 0.0, sweep: 0.0 }
        } else {
            let center = scale(gen.b, 1.0 / gen.a);
            let radius = 1.0 / gen.a.abs();
            let phi0 = (start[1] - center[1]).atan2(start[0] - center[0]);
            let phi1 = (end[1] - center[1]).atan2(end[0] - center[0]);
            // Travel is clockwise for A > 0 (the co-normal then points outward).
            let dir = -gen.a.signum();
            let mut sweep = wrap_tau((phi1 - phi0) * dir);
            if sweep == 0.0 {
                sweep = TAU;
            }
            ArcPiece { gen, start, end, carrier: Carrier2::Circle { center, radius }, phi0, sweep: sweep * dir }
        }
    }

    pub fn carrier(&self) -> Carrier2 {
        self.carrier
    }

    /// Point at parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> P2 {
        match self.carrier {
            Carrier2::Line { point, direction } => add(point, scale(direction, t)),
            Carrier2::Circle { center, radius } => {
                let phi = self.phi0 + self.sweep * t;
                [center[0] + radius * phi.cos(), center[1] + radius * phi.sin()]
            }
        }
    }

    /// Derivative of [`point`](Self::point).
    pub fn velocity(&self, t: f64) -> P2 {
        match self.carrier {
            Carrier2::Line { direction, .. } => direction,
            Carrier2::Circle { radius, .. } => {
                let phi = self.phi0 + self.sweep * t;
                [-radius * self.sweep * phi.sin(), radius * self.sweep * phi.cos()]
            }
        }
    }

    /// Parameter of a point known to lie on the carrier.
    pub fn parameter_of(&self, x: P2) -> f64 {
        match self.carrier {
            Carrier2::Line { point, direction } => dot(sub(x, point), direction) / dot(direction, direction),
            Carrier2::Circle { center, .. } => {
                let phi = (x[1] - center[1]).atan2(x[0] - center[0]);
                let dir = self.sweep.signum();
                wrap_tau((phi - self.phi0) * dir) / self.sweep.abs()
            }
        }
    }

    /// Parameters in `(0, 1)` where the piece meets the carrier of `g`.
    pub fn roots(&self, g: &Gen2) -> Vec<f64> {
        let mut out = Vec::new();
        match self.carrier {
            Carrier2::Line { point, direction } => {
                let qa = g.a * dot(direction, direction);
                let qb = 2.0 * g.a * dot(point, direction) - 2.0 * dot(g.b, direction);
                let qc = g.eval(point);
                if qa.abs() < 1e-300 {
                    if qb != 0.0 {
                        out.push(-qc / qb);
                    }
                } else {
                    let disc = qb * qb - 4.0 * qa * qc;
                    if disc >= 0.0 {
                        let s = disc.sqrt();
                        let r = -0.5 * (qb + qb.signum() * s);
                        if r != 0.0 {
                            out.push(r / qa);
                            out.push(qc / r);
                        } else {
                            out.push(0.0);
                        }
                    }
                }
            }
            Carrier2::Circle { center, radius } => {
                // G(center + R u) = α + w·u.
                let alpha = g.a * (dot(center, center) + radius * radius) - 2.0 * dot(g.b, center) + g.d;
                let w = scale(sub(scale(center, g.a), g.b), 2.0 * radius);
                let wn = norm(w);
                if wn > 0.0 && alpha.abs() <= wn {
                    let base = w[1].atan2(w[0]);
                    let off = (-alpha / wn).clamp(-1.0, 1.0).acos();
                    for phi in [base + off, base - off] {
                        let dir = self.sweep.signum();
                        out.push(wrap_tau((phi - self.phi0) * dir) / self.sweep.abs());
                    }
                }
            }
        }
        out.retain(|&t| t > 0.0 && t < 1.0);
        out.sort_by(f64::total_cmp);
        out
    }

    /// Hyperbolic length between parameters `t0 < t1` (interior points).
    pub fn length(&self, t0: f64, t1: f64) -> f64 {
        let f = |t: f64| {
            let x = self.point(t);
            2.0 * norm(self.velocity(t)) / (1.0 - dot(x, x))
        };
        adaptive_simpson(&f, t0, t1, 1e-14)
    }

    /// `∫ 2/(1 − r²)(x dy − y dx)` between parameters: the hyperbolic-area
    /// flux whose loop integral is the enclosed signed area.
    pub fn area_flux(&self, t0: f64, t1: f64) -> f64 {
        let f = |t: f64| {
            let x = self.point(t);
            let v = self.velocity(t);
            2.0 / (1.0 - dot(x, x)) * (x[0] * v[1] - x[1] * v[0])
        };
        adaptive_simpson(&f, t0, t1, 1e-14)
    }
}

/// The complete curve of constant geodesic curvature `k` with ideal
/// endpoints `p`, `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2Arc {
    pub p: P2,
    pub q: P2,
    pub k: f64,
    pub piece: ArcPiece,
}

impl H2Arc {
    pub fn carrier(&self) -> Carrier2 {
        self.piece.carrier
    }

    /// Which side of the arc `x` lies on: `> 0` left (positive side).
    #[inline]
    pub fn side(&self, x: P2) -> f64 {
        self.piece.gen.eval(x)
    }
}

fn chord_frame(p: P2, q: P2) -> Result<(P2, f64)> {
    let chord = sub(q, p);
    let len = norm(chord);
    if !(len > 1e-12) {
        return Err(Error::InvalidArgument("arc endpoints must be distinct".into()));
    }
    let c = scale(perp(chord), 1.0 / len);
    Ok((c, dot(p, c)))
}

fn check_ideal(p: P2) -> Result<()> {
    if (norm(p) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("sandbox endpoints must lie on the unit circle".into()));
    }
    Ok(())
}

/// The arc of constant curvature `k` from `p` to `q` (left-co-oriented).
pub fn h2_arc(p: P2, q: P2, k: f64) -> Result<H2Arc> {
    if !(k.abs() < 1.0) {
        return Err(Error::CurvatureOutOfRange { h: k, limit: 1.0 });
    }
    check_ideal(p)?;
    check_ideal(q)?;
    let (c, ca) = chord_frame(p, q)?;
    let sa = (1.0 - ca * ca).max(0.0).sqrt();
    let w = ca + k * sa / (1.0 - k * k).sqrt();
    let gen = Gen2::normalized(-w, scale(c, -1.0), w - 2.0 * ca)?;
    Ok(H2Arc { p, q, k, piece: ArcPiece::new(gen, p, q) })
}

/// Curvature `k(x)` of the leaf of the `(p, q)` pencil through `x`.
pub fn leaf_curvature_at(p: P2, q: P2, x: P2) -> Result<f64> {
    let (c, ca) = chord_frame(p, q)?;
    let w = 2.0 * (dot(x, c) - ca) / (dot(x, x) - 1.0);
    Ok((w - ca) / (1.0 - 2.0 * w * ca + w * w).sqrt())
}

/// Piece of curvature `k` joining an ideal point to an interior point.
/// `from_ideal` selects travel away from (`true`) or into (`false`) `ideal`.
fn ideal_piece(ideal: P2, m: P2, k: f64, from_ideal: bool) -> Result<ArcPiece> {
    if !(k.abs() < 1.0) {
        return Err(Error::CurvatureOutOfRange { h: k, limit: 1.0 });
    }
    if !(norm(m) < 1.0) {
        return Err(Error::InvalidArgument("corner point must lie inside the disk".into()));
    }
    // G(x) = A|x|² − 2B·x + A + 2k with B = (A + k) p + β p⊥, β = ±√(1 − k²);
    // the travel tangent at the ideal point is k p⊥ − β p, so β > 0 enters.
    let beta = (1.0 - k * k).sqrt() * if from_ideal { 1.0 } else { -1.0 };
    let pp = perp(ideal);
    let dm = sub(m, ideal);
    let a = 2.0 * (k * (dot(ideal, m) - 1.0) + beta * dot(pp, m)) / dot(dm, dm);
    let b = add(scale(ideal, a + k), scale(pp, beta));
    let gen = Gen2 { a, b, d: a + 2.0 * k };
    Ok(if from_ideal { ArcPiece::new(gen, ideal, m) } else { ArcPiece::new(gen, m, ideal) })
}

/// Piecewise circular curve from `p` to `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct H2Curve {
    pub pieces: Vec<ArcPiece>,
    pub k: f64,
}

impl H2Curve {
    pub fn leaf(arc: &H2Arc) -> H2Curve {
        H2Curve { pieces: alloc::vec![arc.piece], k: arc.k }
    }

    /// Two pieces of curvature `k`, from `p` to the corner `m` and on to `q`.
    pub fn through(p: P2, m: P2, q: P2, k: f64) -> Result<H2Curve> {
        check_ideal(p)?;
        check_ideal(q)?;
        Ok(H2Curve { pieces: alloc::vec![ideal_piece(p, m, k, true)?, ideal_piece(q, m, k, false)?], k })
    }

    pub fn start(&self) -> P2 {
        self.pieces[0].start
    }

    pub fn end(&self) -> P2 {
        self.pieces[self.pieces.len() - 1].end
    }

    /// Point at global parameter `s ∈ [0, pieces]`.
    pub fn point(&self, s: f64) -> P2 {
        let i = (s.floor() as usize).min(self.pieces.len() - 1);
        self.pieces[i].point(s - i as f64)
    }

    fn integrate(&self, s0: f64, s1: f64, f: impl Fn(&ArcPiece, f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (i, piece) in self.pieces.iter().enumerate() {
            let (lo, hi) = (i as f64, (i + 1) as f64);
            let (a, b) = (s0.max(lo), s1.min(hi));
            if a < b {
                total += f(piece, a - lo, b - lo);
            }
        }
        total
    }

    pub fn length(&self, s0: f64, s1: f64) -> f64 {
        self.integrate(s0, s1, |p, a, b| p.length(a, b))
    }

    pub fn area_flux(&self, s0: f64, s1: f64) -> f64 {
        self.integrate(s0, s1, |p, a, b| p.area_flux(a, b))
    }
}

/// Interior crossing of two sandbox curves, with the global parameters on each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub s1: f64,
    pub s2: f64,
    pub point: P2,
}

/// All interior crossings, sorted along the first curve.
pub fn crossings(c1: &H2Curve, c2: &H2Curve) -> Vec<Crossing> {
    let mut out: Vec<Crossing> = Vec::new();
    for (i, a) in c1.pieces.iter().enumerate() {
        for (j, b) in c2.pieces.iter().enumerate() {
            for t in a.roots(&b.gen) {
                let x = a.point(t);
                let u = b.parameter_of(x);
                let interior = dot(x, x) < 1.0 - 1e-9;
                if interior && u > 0.0 && u < 1.0 && dist(b.point(u), x) < 1e-9 {
                    let c = Crossing { s1: i as f64 + t, s2: j as f64 + u, point: x };
                    if !out.iter().any(|o| dist(o.point, x) < 1e-10) {
                        out.push(c);
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.s1.total_cmp(&b.s1));
    out
}

#[inline]
fn dist(a: P2, b: P2) -> f64 {
    norm(sub(a, b))
}

/// Lens decomposition of two curves with common endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeDecomposition {
    /// `|T₁|`: length of the first curve along the boundary of `Q`.
    pub t1: f64,
    /// `|T₂|`: length of the second curve along the boundary of `Q`.
    pub t2: f64,
    /// `|Q|`: hyperbolic area of the region on the negative side of the
    /// second curve and the positive side of the first.
    pub q: f64,
    pub k1: f64,
    pub k2: f64,
    pub crossings: usize,
    /// `I_{k₁}` of the first curve after swapping `T₁` for `T₂`, minus before.
    pub delta_i1: f64,
    /// `I_{k₂}` of the second curve after swapping `T₂` for `T₁`, minus before.
    pub delta_i2: f64,
}

impl ExchangeDecomposition {
    pub fn swap1_improves(&self) -> bool {
        self.delta_i1 < 0.0
    }

    pub fn swap2_improves(&self) -> bool {
        self.delta_i2 < 0.0
    }

    /// Whether both curves could be minimizers:
    /// `|T₂| + k₂|Q| ≤ |T₁| ≤ |T₂| + k₁|Q|`.
    pub fn chain_feasible(&self) -> bool {
        self.t2 + self.k2 * self.q <= self.t1 && self.t1 <= self.t2 + self.k1 * self.q
    }
}

/// Computes the exchange decomposition of `c1` (curvature `k1`) and `c2`
/// (curvature `k2 > k1`).
pub fn h2_exchange(c1: &H2Curve, c2: &H2Curve) -> Result<ExchangeDecomposition> {
    if dist(c1.start(), c2.start()) > 1e-12 || dist(c1.end(), c2.end()) > 1e-12 {
        return Err(Error::InvalidArgument("exchange needs curves with common endpoints".into()));
    }
    let (k1, k2) = (c1.k, c2.k);
    if !(k1 < k2) {
        return Err(Error::InvalidArgument("exchange needs k₁ < k₂".into()));
    }
    let xs = crossings(c1, c2);
    if xs.windows(2).any(|w| !(w[0].s2 < w[1].s2)) {
        return Err(Error::InvalidArgument("crossings are not in the same order on both curves".into()));
    }
    let (mut t1, mut t2, mut q) = (0.0, 0.0, 0.0);
    for w in xs.windows(2) {
        // Loop: forward along c1, back along c2. Counterclockwise ⇔ Q piece.
        let area = c1.area_flux(w[0].s1, w[1].s1) - c2.area_flux(w[0].s2, w[1].s2);
        if area > 0.0 {
            q += area;
            t1 += c1.length(w[0].s1, w[1].s1);
            t2 += c2.length(w[0].s2, w[1].s2);
        }
    }
    Ok(ExchangeDecomposition {
        t1,
        t2,
        q,
        k1,
        k2,
        crossings: xs.len(),
        delta_i1: t2 - t1 + k1 * q,
        delta_i2: t1 - t2 - k2 * q,
    })
}

/// Random crossing pair: `c2` has a corner on or near the `k₂` leaf, `c1`
/// a corner pushed past that leaf to its negative side, so the curves cross
/// twice in the wrong order.
pub fn crossing_pair<R: Rng>(rng: &mut R) -> Result<(H2Curve, H2Curve)> {
    for _ in 0..1000 {
        let a: f64 = rng.gen_range(0.0..TAU);
        let gap: f64 = rng.gen_range(0.6 * PI..1.4 * PI);
        let p = [a.cos(), a.sin()];
        let q = [(a + gap).cos(), (a + gap).sin()];
        let k1: f64 = rng.gen_range(-0.8..0.6);
        let k2: f64 = rng.gen_range(k1 + 0.1..0.8);
        let leaf = h2_arc(p, q, k2)?;
        let x = leaf.piece.point(rng.gen_range(0.3..0.7));
        if !(norm(x) < 0.85) {
            continue;
        }
        let n = leaf.piece.gen.normal(x);
        let m2 = add(x, scale(n, rng.gen_range(-0.02..0.02)));
        let m1 = sub(x, scale(n, rng.gen_range(0.05..0.2)));
        if !(norm(m1) < 0.95) {
            continue;
        }
        let c1 = H2Curve::through(p, m1, q, k1)?;
        let c2 = H2Curve::through(p, m2, q, k2)?;
        if let Ok(ex) = h2_exchange(&c1, &c2) {
            if ex.crossings >= 2 && ex.q > 1e-9 {
                return Ok((c1, c2));
            }
        }
    }
    Err(Error::InvalidArgument("could not generate a crossing pair".into()))
}

/// Result of the sandbox foliation check.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliationReport {
    pub leaves: usize,
    pub pairs_disjoint: bool,
    pub probes: usize,
    pub probes_monotone: bool,
    /// Sample points whose side against every leaf agrees with `k(x)`.
    pub sides_consistent: bool,
    /// Fraction of disk samples lying between the extreme leaves.
    pub swept_fraction: f64,
}

impl FoliationReport {
    pub fn passed(&self) -> bool {
        self.pairs_disjoint && self.probes_monotone && self.sides_consistent
    }
}

/// Checks that the leaves of the `(p, q)` pencil at curvatures `grid` are
/// disjoint, cross every transverse geodesic once and in order, and
/// partition the disk according to `k(x)`.
pub fn h2_foliation_check(p: P2, q: P2, grid: &[f64], tol: f64) -> Result<FoliationReport> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("curvature grid must be strictly increasing".into()));
    }
    let arcs = grid.iter().map(|&k| h2_arc(p, q, k)).collect::<Result<Vec<_>>>()?;
    // Carriers of one pencil meet only at p and q.
    let mut pairs_disjoint = true;
    for (i, a) in arcs.iter().enumerate() {
        for b in &arcs[i + 1..] {
            for t in a.piece.roots(&b.piece.gen) {
                let x = a.piece.point(t);
                if dist(x, p) > tol && dist(x, q) > tol {
                    pairs_disjoint = false;
                }
            }
        }
    }
    // Transverse geodesics from the positive cap to the negative cap.
    let (c, _) = chord_frame(p, q)?;
    let base = c[1].atan2(c[0]);
    let half_p = 0.5 * angle_between(p, q, c);
    let mut probes = 0;
    let mut probes_monotone = true;
    for i in 0..9 {
        let f = (i as f64 - 4.0) / 5.0;
        let u = base + f * half_p;
        let v = base + PI - f * (PI - half_p);
        let probe = h2_arc([u.cos(), u.sin()], [v.cos(), v.sin()], 0.0)?;
        probes += 1;
        let mut last = f64::NEG_INFINITY;
        for arc in &arcs {
            let roots: Vec<f64> = probe
                .piece
                .roots(&arc.piece.gen)
                .into_iter()
                .filter(|&t| {
                    let x = probe.piece.point(t);
                    dist(x, probe.p) > tol && dist(x, probe.q) > tol
                })
                .collect();
            if roots.len() != 1 || !(roots[0] > last) {
                probes_monotone = false;
                break;
            }
            last = roots[0];
        }
    }
    // Side consistency and sweep on a polar sample of the disk.
    let mut sides_consistent = true;
    let (mut inside, mut total) = (0usize, 0usize);
    let (kmin, kmax) = (grid.first().copied(), grid.last().copied());
    for i in 1..40 {
        let r = 0.98 * i as f64 / 40.0;
        for j in 0..64 {
            let t = TAU * (j as f64 + 0.5) / 64.0;
            let x = [r * t.cos(), r * t.sin()];
            let kx = leaf_curvature_at(p, q, x)?;
            total += 1;
            if let (Some(lo), Some(hi)) = (kmin, kmax) {
                if kx >= lo && kx <= hi {
                    inside += 1;
                }
            }
            for arc in &arcs {
                let s = arc.side(x);
                if (kx - arc.k).abs() > 1e-9 && (s > 0.0) != (kx < arc.k) {
                    sides_consistent = false;
                }
            }
        }
    }
    Ok(FoliationReport {
        leaves: arcs.len(),
        pairs_disjoint,
        probes,
        probes_monotone,
        sides_consistent,
        swept_fraction: inside as f64 / total as f64,
    })
}

/// Angular half-width of the positive cap, seen from the origin.
fn angle_between(p: P2, q: P2, c: P2) -> f64 {
    let _ = q;
    2.0 * (dot(p, c)).clamp(-1.0, 1.0).acos()
}


#[inline]
fn wrap_tau(x: f64) -> f64 {
    x - TAU * (x / TAU).floor()
}
