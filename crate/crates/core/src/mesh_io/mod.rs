//! Triangle meshes: STL I/O, welding, topology diagnostics and measurement.
//!
//! A [`TriangleMesh`] is an indexed triangle soup. Meshes parsed from STL
//! carry three vertex slots per facet; run [`weld_vertices`] before anything
//! that needs connectivity ([`diagnostics`], curvature, overhang clustering).

mod measure;
mod stl;
mod topology;

use nalgebra::Point3;
use serde::Serialize;
use thiserror::Error;

pub use measure::{
    bounding_box, signed_volume, surface_area, triangle_area, triangle_normal, VolumeMeasurement,
    VolumePolicy,
};
pub(crate) use topology::{edge_key, vertex_classes};
pub use stl::{detect_format, parse_stl, write_stl, StlError, StlFormat};
pub use topology::{
    diagnostics, edge_incidence, weld_vertices, EdgeKey, MeshDiagnostics,
    DEFAULT_WELD_TOLERANCE_MM, DEGENERATE_AREA_TOLERANCE_MM2,
};

/// Errors raised while constructing or measuring a mesh.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("triangle {triangle} references vertex {index} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: u32,
        vertex_count: usize,
    },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("mesh has no vertices")]
    Empty,
    #[error(
        "volume is undefined on an open or non-manifold surface \
         ({boundary_edges} boundary edges, {non_manifold_edges} non-manifold edges)"
    )]
    NotWatertight {
        boundary_edges: usize,
        non_manifold_edges: usize,
    },
    #[error("mesh has {0} non-manifold edges")]
    NonManifold(usize),
}

/// Indexed triangle mesh with coordinates in millimetres.
///
/// Triangles wind counter-clockwise when seen from outside the solid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
    name: Option<String>,
}

impl TriangleMesh {
    /// Builds a mesh, checking index bounds and coordinate finiteness.
    pub fn new(vertices: Vec<Point3<f64>>, triangles: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        if let Some(i) = vertices
            .iter()
            .position(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()))
        {
            return Err(MeshError::NonFiniteVertex(i));
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &index in tri {
                if index as usize >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        triangle: t,
                        index,
                        vertex_count: vertices.len(),
                    });
                }
            }
        }
        Ok(Self {
            vertices,
            triangles,
            name: None,
        })
    }

    /// Builds an unwelded mesh with three fresh vertex slots per triangle.
    pub fn from_triangle_soup(soup: &[[Point3<f64>; 3]]) -> Result<Self, MeshError> {
        let vertices: Vec<Point3<f64>> = soup.iter().flat_map(|t| t.iter().copied()).collect();
        let triangles = (0..soup.len() as u32)
            .map(|i| [3 * i, 3 * i + 1, 3 * i + 2])
            .collect();
        Self::new(vertices, triangles)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Corner positions of triangle `t`.
    pub fn corners(&self, t: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Returns a copy with every triangle's winding reversed.
    pub fn flipped(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
            name: self.name.clone(),
        }
    }

    /// Applies `f` to every vertex. Non-finite results are rejected.
    pub fn map_vertices<F>(&self, f: F) -> Result<Self, MeshError>
    where
        F: Fn(&Point3<f64>) -> Point3<f64>,
    {
        let mut mesh = Self::new(self.vertices.iter().map(f).collect(), self.triangles.clone())?;
        mesh.name = self.name.clone();
        Ok(mesh)
    }

    /// Removes triangle `t`, keeping the vertex list intact.
    pub fn without_triangle(&self, t: usize) -> Self {
        let mut triangles = self.triangles.clone();
        triangles.remove(t);
        Self {
            vertices: self.vertices.clone(),
            triangles,
            name: self.name.clone(),
        }
    }

    /// Concatenates two meshes without welding.
    pub fn merged(&self, other: &TriangleMesh) -> Self {
        let offset = self.vertices.len() as u32;
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]),
        );
        Self {
            vertices,
            triangles,
            name: self.name.clone(),
        }
    }
}

/// Axis-aligned bounding box in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BoundingBox {
    pub fn extents(&self) -> [f64; 3] {
        [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ]
    }
}
