use nalgebra::{Point3, Vector3};

use crate::mesh_io::{weld_vertices, TriangleMesh};

/// Collects loose triangles and welds them at the end.
///
/// Every push takes the outward direction the face is meant to have and fixes
/// the winding to match, so composite solids can be assembled piecewise
/// without tracking orientation by hand.
#[derive(Debug, Default)]
pub(crate) struct SoupBuilder {
    triangles: Vec<[Point3<f64>; 3]>,
}

/// Shared corners are produced by identical arithmetic, so the weld only has
/// to absorb exact duplicates; the small tolerance guards against ±0.0.
const WELD_TOLERANCE: f64 = 1e-9;

impl SoupBuilder {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn triangle(&mut self, a: Point3<f64>, b: Point3<f64>, c: Point3<f64>, outward: Vector3<f64>) {
        let n = (b - a).cross(&(c - a));
        if n.dot(&outward) < 0.0 {
            self.triangles.push([a, c, b]);
        } else {
            self.triangles.push([a, b, c]);
        }
    }

    /// Planar convex quad `a b c d` (in boundary order), split along `a c`.
    pub(crate) fn quad(&mut self, a: Point3<f64>, b: Point3<f64>, c: Point3<f64>, d: Point3<f64>, outward: Vector3<f64>) {
        self.triangle(a, b, c, outward);
        self.triangle(a, c, d, outward);
    }

    /// Convex polygon (boundary order, collinear points allowed) fanned from
    /// its vertex centroid.
    pub(crate) fn convex_polygon(&mut self, boundary: &[Point3<f64>], outward: Vector3<f64>) {
        let n = boundary.len();
        let centroid = Point3::from(
            boundary.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / n as f64,
        );
        for k in 0..n {
            self.triangle(centroid, boundary[k], boundary[(k + 1) % n], outward);
        }
    }

    pub(crate) fn finish(self) -> TriangleMesh {
        let soup = TriangleMesh::from_triangle_soup(&self.triangles).expect("generated coordinates are finite");
        weld_vertices(&soup, WELD_TOLERANCE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_io::{diagnostics, signed_volume, VolumePolicy};

    #[test]
    fn orientation_follows_requested_normal() {
        let mut b = SoupBuilder::new();
        let (p, q, r) = (Point3::origin(), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0));
        b.triangle(p, q, r, -Vector3::z());
        let mesh = b.finish();
        assert_eq!(mesh.corners(0), [p, r, q]);
    }

    #[test]
    fn tetrahedron_from_pieces_is_closed() {
        let v = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let centre = Point3::new(0.25, 0.25, 0.25);
        let mut b = SoupBuilder::new();
        for [i, j, k] in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            let c = Point3::from((v[i].coords + v[j].coords + v[k].coords) / 3.0);
            b.triangle(v[i], v[j], v[k], c - centre);
        }
        let mesh = b.finish();
        assert!(diagnostics(&mesh).is_watertight);
        let vol = signed_volume(&mesh, VolumePolicy::default()).unwrap().mm3;
        assert!((vol - 1.0 / 6.0).abs() < 1e-15);
    }
}
