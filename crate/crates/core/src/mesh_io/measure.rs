use nalgebra::{Point3, Vector3};
use serde::Serialize;

use super::topology::{diagnostics, weld_vertices, DEFAULT_WELD_TOLERANCE_MM};
use super::{BoundingBox, MeshError, TriangleMesh};
use crate::numeric::compensated_sum;

pub fn triangle_area(corners: &[Point3<f64>; 3]) -> f64 {
    0.5 * (corners[1] - corners[0])
        .cross(&(corners[2] - corners[0]))
        .norm()
}

/// Unit normal from the counter-clockwise winding; `None` for degenerate
/// triangles.
pub fn triangle_normal(corners: &[Point3<f64>; 3]) -> Option<Vector3<f64>> {
    let n = (corners[1] - corners[0]).cross(&(corners[2] - corners[0]));
    let len = n.norm();
    (len > 0.0 && len.is_finite()).then(|| n / len)
}

/// Total area of all triangles, mm².
pub fn surface_area(mesh: &TriangleMesh) -> f64 {
    compensated_sum((0..mesh.triangle_count()).map(|t| triangle_area(&mesh.corners(t))))
}

/// Whether [`signed_volume`] insists on a closed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolumePolicy {
    #[default]
    RequireWatertight,
    /// Compute regardless; the result carries a warning if the surface is open.
    Force,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeMeasurement {
    pub mm3: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl VolumeMeasurement {
    pub fn m3(&self) -> f64 {
        self.mm3 * 1e-9
    }
}

/// Enclosed volume by the divergence theorem: Σ det(v0, v1, v2)/6, positive for
/// outward-wound closed surfaces.
///
/// Closure is checked on a welded copy of the mesh, so raw STL soups are
/// accepted as long as they close up at the default weld tolerance.
pub fn signed_volume(mesh: &TriangleMesh, policy: VolumePolicy) -> Result<VolumeMeasurement, MeshError> {
    let diag = diagnostics(&weld_vertices(mesh, DEFAULT_WELD_TOLERANCE_MM));
    let warning = if diag.is_watertight {
        None
    } else {
        match policy {
            VolumePolicy::RequireWatertight => {
                return Err(MeshError::NotWatertight {
                    boundary_edges: diag.boundary_edge_count,
                    non_manifold_edges: diag.non_manifold_edge_count,
                })
            }
            VolumePolicy::Force => Some(format!(
                "volume forced on a surface with {} boundary and {} non-manifold edges",
                diag.boundary_edge_count, diag.non_manifold_edge_count
            )),
        }
    };
    // Tetrahedra are fanned from the box centre to keep the terms small.
    let origin = match bounding_box(mesh) {
        Ok(bb) => Point3::from([0, 1, 2].map(|k| 0.5 * (bb.min[k] + bb.max[k]))),
        Err(_) => Point3::origin(),
    };
    let mm3 = compensated_sum((0..mesh.triangle_count()).map(|t| {
        let [a, b, c] = mesh.corners(t);
        (a - origin).dot(&(b - origin).cross(&(c - origin)))
    })) / 6.0;
    Ok(VolumeMeasurement { mm3, warning })
}

/// Componentwise extent of all vertices.
pub fn bounding_box(mesh: &TriangleMesh) -> Result<BoundingBox, MeshError> {
    let mut it = mesh.vertices().iter();
    let first = it.next().ok_or(MeshError::Empty)?;
    let mut bb = BoundingBox {
        min: [first.x, first.y, first.z],
        max: [first.x, first.y, first.z],
    };
    for p in it {
        for k in 0..3 {
            bb.min[k] = bb.min[k].min(p[k]);
            bb.max[k] = bb.max[k].max(p[k]);
        }
    }
    Ok(bb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_io::test_fixtures::{unit_cube_soup, unit_cube_welded};

    #[test]
    fn unit_cube_measures() {
        let cube = unit_cube_welded();
        assert_eq!(surface_area(&cube), 6.0);
        assert_eq!(signed_volume(&cube, VolumePolicy::default()).unwrap().mm3, 1.0);
        assert_eq!(signed_volume(&cube.flipped(), VolumePolicy::default()).unwrap().mm3, -1.0);
    }

    #[test]
    fn raw_soup_volume_is_accepted() {
        let v = signed_volume(&unit_cube_soup(), VolumePolicy::default()).unwrap();
        assert_eq!(v.mm3, 1.0);
        assert!(v.warning.is_none());
    }

    #[test]
    fn open_surface_refused_unless_forced() {
        let open = unit_cube_welded().without_triangle(0);
        let err = signed_volume(&open, VolumePolicy::RequireWatertight).unwrap_err();
        assert_eq!(
            err,
            MeshError::NotWatertight {
                boundary_edges: 3,
                non_manifold_edges: 0
            }
        );
        // the missing half-face's tetrahedron to the centre is 1/12 mm³
        let forced = signed_volume(&open, VolumePolicy::Force).unwrap();
        assert!(forced.warning.is_some());
        assert!((forced.mm3 - 11.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn zero_area_triangle_adds_nothing() {
        let p = Point3::new(1.0, 2.0, 3.0);
        let mesh = TriangleMesh::from_triangle_soup(&[[p, p, Point3::new(4.0, 5.0, 6.0)]]).unwrap();
        assert_eq!(surface_area(&mesh), 0.0);
        assert!(triangle_normal(&mesh.corners(0)).is_none());
    }

    #[test]
    fn bounding_box_cases() {
        let single = TriangleMesh::new(vec![Point3::new(1.0, -2.0, 3.0)], vec![]).unwrap();
        let bb = bounding_box(&single).unwrap();
        assert_eq!(bb.min, bb.max);
        assert_eq!(bounding_box(&TriangleMesh::default()), Err(MeshError::Empty));
        let cube = bounding_box(&unit_cube_welded()).unwrap();
        assert_eq!(cube.extents(), [1.0, 1.0, 1.0]);
    }
}
