//! Mesh-quality quantities: triangle counts, the area quality ratio, volume
//! ratios and discrete mean curvature.

mod curvature;
mod histogram;

use serde::Serialize;
use thiserror::Error;

use crate::mesh_io::{surface_area, TriangleMesh};

pub use curvature::{mean_curvature, CurvatureField, CURVATURE_CLAMP};
pub use histogram::{curvature_histogram, histogram, Histogram, Mode, SummaryStats, DEFAULT_BINS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("reference area must be positive and finite, got {0}")]
    NonPositiveReference(f64),
    #[error("volumes must be positive and finite, got {model} and {artifact}")]
    NonPositiveVolume { model: f64, artifact: f64 },
    #[error("face {face} has {vertices} vertices; polygons need at least 3")]
    FaceTooSmall { face: usize, vertices: usize },
    #[error("curvature needs a manifold mesh; found {0} non-manifold edges")]
    NonManifold(usize),
    #[error("no samples to bin")]
    EmptyField,
    #[error("histogram needs at least one bin")]
    ZeroBins,
}

/// Number of triangles.
pub fn mesh_complexity(mesh: &TriangleMesh) -> usize {
    mesh.triangle_count()
}

/// Triangle count after fan-triangulating convex polygons with the given
/// vertex counts.
pub fn polygon_mesh_complexity(face_vertex_counts: &[usize]) -> Result<usize, MetricsError> {
    face_vertex_counts
        .iter()
        .enumerate()
        .try_fold(0usize, |acc, (face, &v)| {
            if v < 3 {
                Err(MetricsError::FaceTooSmall { face, vertices: v })
            } else {
                Ok(acc + (v - 2))
            }
        })
}

/// Tessellated area over reference area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityRatio {
    pub area_mesh: f64,
    pub area_reference: f64,
    pub qs: f64,
}

pub fn quality_ratio(mesh: &TriangleMesh, reference_area: f64) -> Result<QualityRatio, MetricsError> {
    quality_ratio_from_area(surface_area(mesh), reference_area)
}

pub fn quality_ratio_from_area(area_mesh: f64, reference_area: f64) -> Result<QualityRatio, MetricsError> {
    if !(reference_area > 0.0 && reference_area.is_finite()) {
        return Err(MetricsError::NonPositiveReference(reference_area));
    }
    Ok(QualityRatio {
        area_mesh,
        area_reference: reference_area,
        qs: area_mesh / reference_area,
    })
}

/// Where a reference area came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceSource {
    User,
    Analytic,
    Sibling { label: String, triangle_count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedReference {
    pub area_mm2: f64,
    pub source: ReferenceSource,
}

/// Another tessellation of the same solid.
#[derive(Debug, Clone, Copy)]
pub struct SiblingMesh<'a> {
    pub label: &'a str,
    pub mesh: &'a TriangleMesh,
}

/// Picks the reference area by precedence: explicit value, then the
/// generator's analytic record, then the finest sibling tessellation.
pub fn resolve_reference_area(
    user: Option<f64>,
    analytic: Option<f64>,
    siblings: &[SiblingMesh<'_>],
) -> Option<ResolvedReference> {
    if let Some(area_mm2) = user {
        return Some(ResolvedReference {
            area_mm2,
            source: ReferenceSource::User,
        });
    }
    if let Some(area_mm2) = analytic {
        return Some(ResolvedReference {
            area_mm2,
            source: ReferenceSource::Analytic,
        });
    }
    // First of equally fine siblings wins, so input order decides ties.
    let finest = siblings
        .iter()
        .rev()
        .max_by_key(|s| s.mesh.triangle_count())?;
    Some(ResolvedReference {
        area_mm2: surface_area(finest.mesh),
        source: ReferenceSource::Sibling {
            label: finest.label.to_owned(),
            triangle_count: finest.mesh.triangle_count(),
        },
    })
}

/// Model volume over fabricated artifact volume.
pub fn volume_ratio(v_model: f64, v_artifact: f64) -> Result<f64, MetricsError> {
    let ok = |v: f64| v > 0.0 && v.is_finite();
    if !(ok(v_model) && ok(v_artifact)) {
        return Err(MetricsError::NonPositiveVolume {
            model: v_model,
            artifact: v_artifact,
        });
    }
    Ok(v_model / v_artifact)
}
