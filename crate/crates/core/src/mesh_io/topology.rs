use std::collections::HashMap;

use nalgebra::Point3;
use serde::Serialize;

use super::measure::triangle_area;
use super::TriangleMesh;

/// Default distance below which two vertices are considered the same point.
pub const DEFAULT_WELD_TOLERANCE_MM: f64 = 1e-6;
/// Triangles with smaller area are reported as degenerate.
pub const DEGENERATE_AREA_TOLERANCE_MM2: f64 = 1e-12;

/// Undirected edge, smaller vertex index first.
pub type EdgeKey = (u32, u32);

pub(crate) fn edge_key(a: u32, b: u32) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Merges vertices closer than `tolerance` using a uniform grid of cell size
/// `tolerance`, so every candidate lies in one of the 27 cells around a
/// vertex. The first vertex seen in a cluster becomes its representative and
/// keeps its coordinates. Triangles that collapse onto a repeated index are
/// dropped. With `tolerance == 0` only bit-identical positions merge
/// (`-0.0` and `0.0` compare equal).
pub fn weld_vertices(mesh: &TriangleMesh, tolerance: f64) -> TriangleMesh {
    let remap = vertex_classes(mesh, tolerance);

    let mut used = vec![u32::MAX; mesh.vertex_count()];
    let mut vertices = Vec::new();
    for (i, &rep) in remap.iter().enumerate() {
        if rep as usize == i {
            used[i] = vertices.len() as u32;
            vertices.push(mesh.vertices()[i]);
        }
    }
    let triangles = mesh
        .triangles()
        .iter()
        .map(|t| t.map(|v| used[remap[v as usize] as usize]))
        .filter(|[a, b, c]| a != b && b != c && a != c)
        .collect();

    let welded = TriangleMesh::new(vertices, triangles).expect("welding preserves validity");
    match mesh.name() {
        Some(name) => welded.with_name(name),
        None => welded,
    }
}

/// Representative vertex index for every vertex, as chosen by
/// [`weld_vertices`] at the same tolerance.
pub(crate) fn vertex_classes(mesh: &TriangleMesh, tolerance: f64) -> Vec<u32> {
    let tolerance = tolerance.max(0.0);
    if tolerance == 0.0 {
        weld_exact(mesh.vertices())
    } else {
        weld_grid(mesh.vertices(), tolerance)
    }
}

fn canonical_bits(p: &Point3<f64>) -> [u64; 3] {
    // +0.0 folds -0.0 into 0.0
    [
        (p.x + 0.0).to_bits(),
        (p.y + 0.0).to_bits(),
        (p.z + 0.0).to_bits(),
    ]
}

fn weld_exact(vertices: &[Point3<f64>]) -> Vec<u32> {
    let mut seen: HashMap<[u64; 3], u32> = HashMap::with_capacity(vertices.len());
    vertices
        .iter()
        .enumerate()
        .map(|(i, p)| *seen.entry(canonical_bits(p)).or_insert(i as u32))
        .collect()
}

fn weld_grid(vertices: &[Point3<f64>], tolerance: f64) -> Vec<u32> {
    let cell = |p: &Point3<f64>| {
        [
            (p.x / tolerance).floor() as i64,
            (p.y / tolerance).floor() as i64,
            (p.z / tolerance).floor() as i64,
        ]
    };
    let tol2 = tolerance * tolerance;
    let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::with_capacity(vertices.len());
    let mut remap = Vec::with_capacity(vertices.len());
    for (i, p) in vertices.iter().enumerate() {
        let c = cell(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(reps) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        for &r in reps {
                            if (vertices[r as usize] - p).norm_squared() <= tol2 {
                                found = Some(r);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        match found {
            Some(r) => remap.push(r),
            None => {
                grid.entry(c).or_default().push(i as u32);
                remap.push(i as u32);
            }
        }
    }
    remap
}

/// Number of triangles incident to every undirected edge.
pub fn edge_incidence(mesh: &TriangleMesh) -> HashMap<EdgeKey, u32> {
    let mut edges: HashMap<EdgeKey, u32> = HashMap::with_capacity(mesh.triangle_count() * 3 / 2);
    for &[a, b, c] in mesh.triangles() {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            *edges.entry(edge_key(u, v)).or_insert(0) += 1;
        }
    }
    edges
}

/// Topological and numerical health of a welded mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeshDiagnostics {
    pub triangle_count: usize,
    pub degenerate_triangle_count: usize,
    pub non_manifold_edge_count: usize,
    pub boundary_edge_count: usize,
    pub is_watertight: bool,
    pub duplicate_vertex_count: usize,
}

/// Classifies every edge by its number of incident triangles
/// (1 = boundary, 2 = interior, 3+ = non-manifold). Expects a welded mesh;
/// on an unwelded STL soup every edge is a boundary edge.
pub fn diagnostics(mesh: &TriangleMesh) -> MeshDiagnostics {
    let edges = edge_incidence(mesh);
    let boundary = edges.values().filter(|&&n| n == 1).count();
    let non_manifold = edges.values().filter(|&&n| n >= 3).count();
    let degenerate = (0..mesh.triangle_count())
        .filter(|&t| triangle_area(&mesh.corners(t)) < DEGENERATE_AREA_TOLERANCE_MM2)
        .count();
    let distinct = weld_exact(mesh.vertices())
        .iter()
        .enumerate()
        .filter(|(i, &r)| r as usize == *i)
        .count();
    MeshDiagnostics {
        triangle_count: mesh.triangle_count(),
        degenerate_triangle_count: degenerate,
        non_manifold_edge_count: non_manifold,
        boundary_edge_count: boundary,
        is_watertight: boundary == 0 && non_manifold == 0,
        duplicate_vertex_count: mesh.vertex_count() - distinct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_io::test_fixtures::{unit_cube_soup, unit_cube_welded};

    #[test]
    fn cube_soup_welds_to_eight_vertices() {
        let soup = unit_cube_soup();
        assert_eq!(soup.vertex_count(), 36);
        let welded = weld_vertices(&soup, DEFAULT_WELD_TOLERANCE_MM);
        assert_eq!(welded.vertex_count(), 8);
        assert_eq!(welded.triangle_count(), 12);
    }

    #[test]
    fn welding_is_idempotent() {
        let welded = weld_vertices(&unit_cube_soup(), DEFAULT_WELD_TOLERANCE_MM);
        assert_eq!(weld_vertices(&welded, DEFAULT_WELD_TOLERANCE_MM), welded);
        assert_eq!(weld_vertices(&welded, 0.0), welded);
    }

    #[test]
    fn near_coincident_vertices_merge() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        let d = Point3::new(1.0, 1.0, 0.0);
        let jitter = nalgebra::Vector3::new(3e-7, -2e-7, 1e-7);
        let mesh = TriangleMesh::from_triangle_soup(&[[a, b, c], [b + jitter, d, c - jitter]]).unwrap();
        let welded = weld_vertices(&mesh, DEFAULT_WELD_TOLERANCE_MM);
        assert_eq!(welded.vertex_count(), 4);
        let diag = diagnostics(&welded);
        assert_eq!(diag.boundary_edge_count, 4);
        let shared = edge_incidence(&welded).values().filter(|&&n| n == 2).count();
        assert_eq!(shared, 1);
    }

    #[test]
    fn vertices_across_grid_cells_still_merge() {
        let tol = 1e-3;
        // straddle a cell boundary at x = 1e-3
        let p = Point3::new(0.99e-3, 0.0, 0.0);
        let q = Point3::new(1.01e-3, 0.0, 0.0);
        let r = Point3::new(1.0, 1.0, 0.0);
        let mesh = TriangleMesh::new(vec![p, q, r], vec![]).unwrap();
        assert_eq!(weld_vertices(&mesh, tol).vertex_count(), 2);
    }

    #[test]
    fn collapsed_triangles_dropped() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1e-8, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        let mesh = TriangleMesh::from_triangle_soup(&[[a, b, c]]).unwrap();
        assert_eq!(weld_vertices(&mesh, DEFAULT_WELD_TOLERANCE_MM).triangle_count(), 0);
    }

    #[test]
    fn welded_cube_is_watertight() {
        let diag = diagnostics(&unit_cube_welded());
        assert!(diag.is_watertight);
        assert_eq!(diag.boundary_edge_count, 0);
        assert_eq!(diag.non_manifold_edge_count, 0);
        assert_eq!(diag.duplicate_vertex_count, 0);
        assert_eq!(diag.degenerate_triangle_count, 0);
    }

    #[test]
    fn single_triangle_has_three_boundary_edges() {
        let mesh = TriangleMesh::from_triangle_soup(&[[
            Point3::origin(),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ]])
        .unwrap();
        let diag = diagnostics(&mesh);
        assert_eq!(diag.boundary_edge_count, 3);
        assert!(!diag.is_watertight);
    }

    #[test]
    fn cube_missing_a_facet_has_three_boundary_edges() {
        // Brute-force oracle: count edges with exactly one incident facet by
        // scanning every facet pair.
        let cube = unit_cube_welded().without_triangle(5);
        let tris = cube.triangles();
        let mut boundary = 0;
        for (i, t) in tris.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                let shared = tris
                    .iter()
                    .enumerate()
                    .any(|(j, s)| j != i && s.contains(&u) && s.contains(&v));
                if !shared {
                    boundary += 1;
                }
            }
        }
        assert_eq!(boundary, 3);
        assert_eq!(diagnostics(&cube).boundary_edge_count, boundary);
    }

    #[test]
    fn three_triangles_on_one_edge_are_non_manifold() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let fins = [
            Point3::new(0.5, 1.0, 0.0),
            Point3::new(0.5, -1.0, 0.0),
            Point3::new(0.5, 0.0, 1.0),
        ];
        let soup: Vec<_> = fins.iter().map(|&c| [a, b, c]).collect();
        let mesh = weld_vertices(&TriangleMesh::from_triangle_soup(&soup).unwrap(), 1e-6);
        let diag = diagnostics(&mesh);
        assert_eq!(diag.non_manifold_edge_count, 1);
        assert!(!diag.is_watertight);
    }

    #[test]
    fn duplicates_and_degenerates_counted() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(2.0, 0.0, 0.0);
        let mesh = TriangleMesh::new(vec![a, b, c, a], vec![[0, 1, 2]]).unwrap();
        let diag = diagnostics(&mesh);
        assert_eq!(diag.duplicate_vertex_count, 1);
        assert_eq!(diag.degenerate_triangle_count, 1);
    }
}
