use nalgebra::Vector3;
use serde::Serialize;

use super::MetricsError;
use crate::mesh_io::{diagnostics, TriangleMesh};

/// Bound on |H| in 1/mm so degenerate fans cannot blow up histograms.
pub const CURVATURE_CLAMP: f64 = 1e4;

/// Per-vertex mean curvature with the mixed areas it was normalized by.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureField {
    /// 1/mm; positive where the surface bulges outward.
    pub mean: Vec<f64>,
    /// mm²; zero for vertices no triangle uses.
    pub mixed_area: Vec<f64>,
}

impl CurvatureField {
    /// Σ H·A over all vertices, the discrete integral of mean curvature.
    pub fn integral(&self) -> f64 {
        self.mean.iter().zip(&self.mixed_area).map(|(h, a)| h * a).sum()
    }
}

/// Cotangent Laplace–Beltrami estimate of mean curvature with mixed Voronoi
/// areas (obtuse triangles give their obtuse corner half their area and the
/// other corners a quarter each).
///
/// Expects a welded mesh. Open boundaries are tolerated; non-manifold edges
/// are rejected.
pub fn mean_curvature(mesh: &TriangleMesh) -> Result<CurvatureField, MetricsError> {
    let diag = diagnostics(mesh);
    if diag.non_manifold_edge_count > 0 {
        return Err(MetricsError::NonManifold(diag.non_manifold_edge_count));
    }
    let n = mesh.vertex_count();
    let mut laplace = vec![Vector3::zeros(); n];
    let mut normal = vec![Vector3::zeros(); n];
    let mut area = vec![0.0; n];

    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.corners(t);
        let cross = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let double_area = cross.norm();
        if double_area.is_nan() || double_area <= 0.0 {
            continue;
        }
        let tri_area = double_area / 2.0;
        // cot of the angle at corner k, opposite edge (k+1, k+2)
        let cot: [f64; 3] = std::array::from_fn(|k| {
            let u = p[(k + 1) % 3] - p[k];
            let v = p[(k + 2) % 3] - p[k];
            u.dot(&v) / double_area
        });
        let obtuse = (0..3).find(|&k| cot[k] < 0.0);
        for k in 0..3 {
            let i = tri[k] as usize;
            let eij = p[(k + 1) % 3] - p[k];
            let eil = p[(k + 2) % 3] - p[k];
            // edge i–j is opposite corner l, edge i–l opposite corner j
            laplace[i] -= eij * cot[(k + 2) % 3] + eil * cot[(k + 1) % 3];
            normal[i] += cross;
            area[i] += match obtuse {
                None => (eij.norm_squared() * cot[(k + 2) % 3] + eil.norm_squared() * cot[(k + 1) % 3]) / 8.0,
                Some(o) if o == k => tri_area / 2.0,
                Some(_) => tri_area / 4.0,
            };
        }
    }

    let mean = (0..n)
        .map(|i| {
            if area[i] <= 0.0 {
                return 0.0;
            }
            let k = laplace[i] / (2.0 * area[i]);
            let h = k.norm() / 2.0;
            let signed = if k.dot(&normal[i]) < 0.0 { -h } else { h };
            signed.clamp(-CURVATURE_CLAMP, CURVATURE_CLAMP)
        })
        .collect();
    Ok(CurvatureField {
        mean,
        mixed_area: area,
    })
}
