//! Sobolev preconditioner: a λ²-weighted cotangent Laplacian on the free
//! vertices, inverted by conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::Vec3;
use crate::mesh::DiscreteSurface;
#[allow(unused_imports)]
use num_traits::Float;

/// Floor on cotangent weights, which keeps the operator positive definite
/// on obtuse triangles.
const MIN_WEIGHT: f64 = 0.05;

/// Symmetric sparse matrix in compressed rows over the free vertices.
#[derive(Debug, Clone)]
pub struct Laplacian {
    /// Free-vertex index for every mesh vertex (`usize::MAX` if pinned).
    slot: Vec<usize>,
    free: Vec<usize>,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl Laplacian {
    pub fn new(s: &DiscreteSurface) -> Laplacian {
        let pinned = s.pinned_mask();
        let mut slot = vec![usize::MAX; s.vertices.len()];
        let mut free = Vec::new();
        for (i, &p) in pinned.iter().enumerate() {
            if !p {
                slot[i] = free.len();
                free.push(i);
            }
        }
        // Accumulate half-cotangent weights per undirected edge.
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(3 * s.triangles.len());
        for t in &s.triangles {
            let p = t.map(|i| s.vertices[i]);
            for k in 0..3 {
                let (i, j) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                let u = p[(k + 1) % 3] - p[k];
                let v = p[(k + 2) % 3] - p[k];
                let cot = u.dot(v) / u.cross(v).norm().max(1e-300);
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                entries.push((a, b, 0.5 * cot));
            }
        }
        entries.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len() / 2 + 1);
        for (a, b, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == a && last.1 == b => last.2 += w,
                _ => merged.push((a, b, w)),
            }
        }
        let n = free.len();
        let mut diag = vec![0.0; n];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (a, b, w) in merged {
            let m = (s.vertices[a] + s.vertices[b]) * 0.5;
            let l2 = {
                let q = 1.0 - m.norm2();
                4.0 / (q * q)
            };
            let w = w.max(MIN_WEIGHT) * l2;
            let (sa, sb) = (slot[a], slot[b]);
            if sa != usize::MAX {
                diag[sa] += w;
            }
            if sb != usize::MAX {
                diag[sb] += w;
            }
            if sa != usize::MAX && sb != usize::MAX {
                rows[sa].push((sb, -w));
                rows[sb].push((sa, -w));
            }
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_start.push(cols.len());
        }
        Laplacian { slot, free, row_start, cols, vals, diag }
    }

    fn apply(&self, x: &[Vec3], y: &mut [Vec3]) {
        for i in 0..self.free.len() {
            let mut acc = x[i] * self.diag[i];
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            y[i] = acc;
        }
    }

    /// Solves `L d = g` on the free vertices (componentwise CG with Jacobi
    /// preconditioning); pinned rows of the result are zero.
    pub fn solve(&self, g: &[Vec3], rel_tol: f64, max_iter: usize) -> Vec<Vec3> {
        let n = self.free.len();
        let b: Vec<Vec3> = self.free.iter().map(|&i| g[i]).collect();
        let mut x = vec![Vec3::ZERO; n];
        let mut r = b.clone();
        let inv: Vec<f64> = self.diag.iter().map(|d| 1.0 / d).collect();
        let precond = |r: &[Vec3]| -> Vec<Vec3> { r.iter().zip(&inv).map(|(v, d)| *v * *d).collect() };
        let mut z = precond(&r);
        let mut p = z.clone();
        let mut ap = vec![Vec3::ZERO; n];
        // Each coordinate is an independent system; run them in lockstep.
        let dot3 = |a: &[Vec3], b: &[Vec3]| {
            let mut s = [0.0; 3];
            for (u, v) in a.iter().zip(b) {
                s[0] += u.x * v.x;
                s[1] += u.y * v.y;
                s[2] += u.z * v.z;
            }
            s
        };
        let b_norm = dot3(&b, &b).map(|v| v.sqrt());
        let mut rz = dot3(&r, &z);
        for _ in 0..max_iter {
            let rr = dot3(&r, &r);
            if (0..3).all(|c| rr[c].sqrt() <= rel_tol * b_norm[c] || b_norm[c] == 0.0) {
                break;
            }
            self.apply(&p, &mut ap);
            let pap = dot3(&p, &ap);
            let alpha: [f64; 3] = core::array::from_fn(|c| if pap[c] > 0.0 { rz[c] / pap[c] } else { 0.0 });
            for i in 0..n {
                x[i] += Vec3::new(p[i].x * alpha[0], p[i].y * alpha[1], p[i].z * alpha[2]);
                r[i] -= Vec3::new(ap[i].x * alpha[0], ap[i].y * alpha[1], ap[i].z * alpha[2]);
            }
            z = precond(&r);
            let rz_new = dot3(&r, &z);
            let beta: [f64; 3] = core::array::from_fn(|c| if rz[c] > 0.0 { rz_new[c] / rz[c] } else { 0.0 });
            for i in 0..n {
                p[i] = z[i] + Vec3::new(p[i].x * beta[0], p[i].y * beta[1], p[i].z * beta[2]);
            }
            rz = rz_new;
        }
        let mut out = vec![Vec3::ZERO; g.len()];
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = x[k];
        }
        let _ = &self.slot;
        out
    }
}
