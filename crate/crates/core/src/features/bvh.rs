use nalgebra::{Point3, Vector3};

use crate::mesh_io::TriangleMesh;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Point3<f64>,
    max: Point3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            min: Point3::from([f64::INFINITY; 3]),
            max: Point3::from([f64::NEG_INFINITY; 3]),
        }
    }

    fn grow(&mut self, p: &Point3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    /// Entry distance of the ray, if it meets the box before `t_max`.
    fn entry(&self, origin: &Point3<f64>, inv_dir: &Vector3<f64>, t_max: f64) -> Option<f64> {
        let mut lo = 0.0f64;
        let mut hi = t_max;
        for k in 0..3 {
            let a = (self.min[k] - origin[k]) * inv_dir[k];
            let b = (self.max[k] - origin[k]) * inv_dir[k];
            // NaN from 0·∞ means the ray runs inside the slab plane
            let (near, far) = if a <= b { (a, b) } else { (b, a) };
            if !near.is_nan() {
                lo = lo.max(near);
            }
            if !far.is_nan() {
                hi = hi.min(far);
            }
            if lo > hi {
                return None;
            }
        }
        Some(lo)
    }
}

#[derive(Debug)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

/// Bounding-volume hierarchy over a mesh's triangles, split at the centroid
/// median of the widest axis.
#[derive(Debug)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
    corners: Vec<[Point3<f64>; 3]>,
}

impl Bvh {
    pub(crate) fn build(mesh: &TriangleMesh) -> Self {
        let corners: Vec<_> = (0..mesh.triangle_count()).map(|t| mesh.corners(t)).collect();
        let centroids: Vec<Point3<f64>> = corners
            .iter()
            .map(|c| Point3::from((c[0].coords + c[1].coords + c[2].coords) / 3.0))
            .collect();
        let mut bvh = Self {
            nodes: Vec::new(),
            order: (0..corners.len()).collect(),
            corners,
        };
        if !bvh.order.is_empty() {
            bvh.build_node(0, bvh.order.len(), &centroids);
        }
        bvh
    }

    fn build_node(&mut self, start: usize, end: usize, centroids: &[Point3<f64>]) -> usize {
        let mut bounds = Aabb::empty();
        let mut spread = Aabb::empty();
        for &t in &self.order[start..end] {
            for p in &self.corners[t] {
                bounds.grow(p);
            }
            spread.grow(&centroids[t]);
        }
        let slot = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bounds, start, end });
            return slot;
        }
        let extent = spread.max - spread.min;
        let axis = extent.imax();
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a][axis]
                .total_cmp(&centroids[b][axis])
                .then(a.cmp(&b))
        });
        self.nodes.push(Node::Leaf { bounds, start, end });
        let left = self.build_node(start, mid, centroids);
        let right = self.build_node(mid, end, centroids);
        self.nodes[slot] = Node::Inner { bounds, left, right };
        slot
    }

    /// Nearest triangle hit with distance above `t_min`, ignoring `skip`.
    pub(crate) fn first_hit(
        &self,
        origin: &Point3<f64>,
        dir: &Vector3<f64>,
        t_min: f64,
        skip: usize,
    ) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = dir.map(|c| 1.0 / c);
        let mut best: Option<(usize, f64)> = None;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let t_max = best.map_or(f64::INFINITY, |(_, t)| t);
            if self.nodes[n].bounds().entry(origin, &inv, t_max).is_none() {
                continue;
            }
            match self.nodes[n] {
                Node::Leaf { start, end, .. } => {
                    for &t in &self.order[start..end] {
                        if t == skip {
                            continue;
                        }
                        if let Some(d) = intersect(&self.corners[t], origin, dir) {
                            let better = match best {
                                Some((bt, bd)) => d < bd || (d == bd && t < bt),
                                None => true,
                            };
                            if d > t_min && better {
                                best = Some((t, d));
                            }
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        best
    }
}

/// Möller–Trumbore; returns the ray parameter of a front- or back-face hit.
fn intersect(tri: &[Point3<f64>; 3], origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() <= 1e-14 * e1.norm() * e2.norm() * dir.norm() {
        return None;
    }
    let inv_det = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&p) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    Some(e2.dot(&q) * inv_det)
}
