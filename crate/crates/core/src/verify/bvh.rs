//! Bounding-volume hierarchy over the triangles of one mesh.

use alloc::vec::Vec;

use crate::math::{closest_point_on_triangle, segment_triangle, Vec3};
use crate::mesh::DiscreteSurface;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Vec3,
    hi: Vec3,
}

impl Aabb {
    const EMPTY: Aabb = Aabb {
        lo: Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
        hi: Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    fn grow(&mut self, p: Vec3) {
        self.lo = Vec3::new(self.lo.x.min(p.x), self.lo.y.min(p.y), self.lo.z.min(p.z));
        self.hi = Vec3::new(self.hi.x.max(p.x), self.hi.y.max(p.y), self.hi.z.max(p.z));
    }

    fn merge(a: Aabb, b: Aabb) -> Aabb {
        let mut m = a;
        m.grow(b.lo);
        m.grow(b.hi);
        m
    }

    fn dist2(&self, p: Vec3) -> f64 {
        let d = |v: f64, lo: f64, hi: f64| if v < lo { lo - v } else if v > hi { v - hi } else { 0.0 };
        let (dx, dy, dz) = (d(p.x, self.lo.x, self.hi.x), d(p.y, self.lo.y, self.hi.y), d(p.z, self.lo.z, self.hi.z));
        dx * dx + dy * dy + dz * dz
    }

    fn overlaps(&self, o: &Aabb) -> bool {
        self.lo.x <= o.hi.x && o.lo.x <= self.hi.x && self.lo.y <= o.hi.y && o.lo.y <= self.hi.y && self.lo.z <= o.hi.z && o.lo.z <= self.hi.z
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { bbox: Aabb, tris: Vec<usize> },
    Inner { bbox: Aabb, left: usize, right: usize },
}

impl Node {
    fn bbox(&self) -> &Aabb {
        match self {
            Node::Leaf { bbox, .. } | Node::Inner { bbox, .. } => bbox,
        }
    }
}

/// Triangle BVH supporting nearest-point, segment and overlap queries.
#[derive(Debug, Clone)]
pub struct Bvh<'a> {
    mesh: &'a DiscreteSurface,
    nodes: Vec<Node>,
    root: usize,
}

const LEAF_SIZE: usize = 8;

impl<'a> Bvh<'a> {
    pub fn new(mesh: &'a DiscreteSurface) -> Bvh<'a> {
        let boxes: Vec<Aabb> = mesh
            .triangles
            .iter()
            .map(|t| {
                let mut b = Aabb::EMPTY;
                for &i in t {
                    b.grow(mesh.vertices[i]);
                }
                b
            })
            .collect();
        let mut bvh = Bvh { mesh, nodes: Vec::new(), root: 0 };
        let mut ids: Vec<usize> = (0..mesh.triangles.len()).collect();
        bvh.root = bvh.build(&boxes, &mut ids);
        bvh
    }

    fn build(&mut self, boxes: &[Aabb], ids: &mut [usize]) -> usize {
        let bbox = ids.iter().fold(Aabb::EMPTY, |acc, &i| Aabb::merge(acc, boxes[i]));
        if ids.len() <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bbox, tris: ids.to_vec() });
            return self.nodes.len() - 1;
        }
        let ext = bbox.hi - bbox.lo;
        let axis = if ext.x >= ext.y && ext.x >= ext.z { 0 } else if ext.y >= ext.z { 1 } else { 2 };
        let key = |i: usize| boxes[i].lo[axis] + boxes[i].hi[axis];
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&a, &b| key(a).total_cmp(&key(b)));
        let (l, r) = ids.split_at_mut(mid);
        let left = self.build(boxes, l);
        let right = self.build(boxes, r);
        self.nodes.push(Node::Inner { bbox, left, right });
        self.nodes.len() - 1
    }

    fn tri(&self, i: usize) -> [Vec3; 3] {
        self.mesh.triangles[i].map(|k| self.mesh.vertices[k])
    }

    /// Closest point on the mesh to `p`.
    pub fn closest_point(&self, p: Vec3) -> Vec3 {
        let mut best = (f64::INFINITY, p);
        let mut stack = alloc::vec![self.root];
        while let Some(n) = stack.pop() {
            if self.nodes[n].bbox().dist2(p) >= best.0 {
                continue;
            }
            match &self.nodes[n] {
                Node::Leaf { tris, .. } => {
                    for &t in tris {
                        let [a, b, c] = self.tri(t);
                        let q = closest_point_on_triangle(p, a, b, c);
                        let d = (q - p).norm2();
                        if d < best.0 {
                            best = (d, q);
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let (dl, dr) = (self.nodes[*left].bbox().dist2(p), self.nodes[*right].bbox().dist2(p));
                    if dl < dr {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        best.1
    }

    /// Parameters in `[0, 1]` where segment `p0 → p1` crosses the mesh,
    /// sorted, with hits on shared edges merged.
    pub fn segment_hits(&self, p0: Vec3, p1: Vec3) -> Vec<f64> {
        let mut sb = Aabb::EMPTY;
        sb.grow(p0);
        sb.grow(p1);
        let mut hits = Vec::new();
        let mut stack = alloc::vec![self.root];
        while let Some(n) = stack.pop() {
            if !self.nodes[n].bbox().overlaps(&sb) {
                continue;
            }
            match &self.nodes[n] {
                Node::Leaf { tris, .. } => {
                    for &t in tris {
                        let [a, b, c] = self.tri(t);
                        if let Some(s) = segment_triangle(p0, p1, a, b, c) {
                            hits.push(s);
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(*left);
                    stack.push(*right);
                }
            }
        }
        hits.sort_by(f64::total_cmp);
        hits.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        hits
    }

    /// Whether any triangle of `self` intersects any triangle of `other`.
    pub fn intersects(&self, other: &Bvh<'_>) -> bool {
        let mut stack = alloc::vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            if !self.nodes[a].bbox().overlaps(other.nodes[b].bbox()) {
                continue;
            }
            match (&self.nodes[a], &other.nodes[b]) {
                (Node::Leaf { tris: ta, .. }, Node::Leaf { tris: tb, .. }) => {
                    for &i in ta {
                        for &j in tb {
                            if triangles_intersect(self.tri(i), other.tri(j)) {
                                return true;
                            }
                        }
                    }
                }
                (Node::Inner { left, right, .. }, _) => {
                    stack.push((*left, b));
                    stack.push((*right, b));
                }
                (Node::Leaf { .. }, Node::Inner { left, right, .. }) => {
                    stack.push((a, *left));
                    stack.push((a, *right));
                }
            }
        }
        false
    }
}

/// Two triangles in general position intersect iff an edge of one crosses
/// the other.
pub fn triangles_intersect(p: [Vec3; 3], q: [Vec3; 3]) -> bool {
    let crosses = |s: &[Vec3; 3], t: &[Vec3; 3]| {
        (0..3).any(|k| segment_triangle(s[k], s[(k + 1) % 3], t[0], t[1], t[2]).is_some())
    };
    crosses(&p, &q) || crosses(&q, &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Provenance;

    fn square(z: f64) -> DiscreteSurface {
        let n = 10;
        let mut vertices = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                vertices.push(Vec3::new(i as f64 / n as f64 - 0.5, j as f64 / n as f64 - 0.5, z));
            }
        }
        let mut triangles = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let a = j * (n + 1) + i;
                triangles.push([a, a + 1, a + n + 2]);
                triangles.push([a, a + n + 2, a + n + 1]);
            }
        }
        DiscreteSurface { vertices, triangles, boundary: Vec::new(), h: 0.0, eps: 0.02, provenance: Provenance::Initial }
    }

    #[test]
    fn queries_on_a_square() {
        let s = square(0.0);
        let bvh = Bvh::new(&s);
        let q = bvh.closest_point(Vec3::new(0.1, 0.2, 0.3));
        assert!((q - Vec3::new(0.1, 0.2, 0.0)).norm() < 1e-12);
        let q = bvh.closest_point(Vec3::new(0.9, 0.0, 0.0));
        assert!((q - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-12);
        // A vertical segment through a shared edge is one hit.
        let hits = bvh.segment_hits(Vec3::new(0.0, 0.0, -1.0), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(hits.len(), 1);
        assert!((hits[0] - 0.5).abs() < 1e-12);
        let other = square(0.1);
        assert!(!bvh.intersects(&Bvh::new(&other)));
        let mut tilted = square(0.0);
        for v in &mut tilted.vertices {
            *v = Vec3::new(v.x, 0.0, v.y);
        }
        assert!(bvh.intersects(&Bvh::new(&tilted)));
    }
}
