use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use nalgebra::{Point3, Vector3};

use super::builder::SoupBuilder;
use crate::mesh_io::TriangleMesh;

pub(crate) fn segments(resolution: u32) -> usize {
    4usize << resolution.min(40)
}

/// Height divisions that keep side quads roughly square.
pub(crate) fn cylinder_rings(radius: f64, height: f64, segments: usize) -> usize {
    let edge = TAU * radius / segments as f64;
    ((height / edge).round() as usize).max(1)
}

pub(crate) fn tube_segments(segments: usize, major: f64, minor: f64) -> usize {
    ((segments as f64 * minor / major).round() as usize).max(4)
}

fn ring_point(radius: f64, j: usize, n: usize, z: f64) -> Point3<f64> {
    let a = TAU * (j % n) as f64 / n as f64;
    Point3::new(radius * a.cos(), radius * a.sin(), z)
}

const PHI: f64 = 1.618_033_988_749_895;

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

pub(crate) fn icosphere(radius: f64, level: u32) -> TriangleMesh {
    let mut unit: Vec<Vector3<f64>> = [
        [-1.0, PHI, 0.0],
        [1.0, PHI, 0.0],
        [-1.0, -PHI, 0.0],
        [1.0, -PHI, 0.0],
        [0.0, -1.0, PHI],
        [0.0, 1.0, PHI],
        [0.0, -1.0, -PHI],
        [0.0, 1.0, -PHI],
        [PHI, 0.0, -1.0],
        [PHI, 0.0, 1.0],
        [-PHI, 0.0, -1.0],
        [-PHI, 0.0, 1.0],
    ]
    .iter()
    .map(|v| Vector3::from(*v).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = ICOSAHEDRON_FACES.to_vec();

    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, unit: &mut Vec<Vector3<f64>>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                unit.push(((unit[a] + unit[b]) / 2.0).normalize());
                unit.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut unit);
            let bc = midpoint(b, c, &mut unit);
            let ca = midpoint(c, a, &mut unit);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }

    let vertices = unit.iter().map(|u| Point3::from(u * radius)).collect();
    let triangles = faces.iter().map(|f| f.map(|i| i as u32)).collect();
    TriangleMesh::new(vertices, triangles).expect("icosphere indices are in range")
}

/// Poles on the z axis.
pub(crate) fn uv_sphere(radius: f64, stacks: usize) -> TriangleMesh {
    let slices = 2 * stacks;
    let north = Point3::new(0.0, 0.0, radius);
    let south = Point3::new(0.0, 0.0, -radius);
    let point = |i: usize, j: usize| {
        if i == 0 {
            return north;
        }
        if i == stacks {
            return south;
        }
        let polar = PI * i as f64 / stacks as f64;
        ring_point(radius * polar.sin(), j, slices, radius * polar.cos())
    };
    let mut b = SoupBuilder::new();
    for i in 0..stacks {
        for j in 0..slices {
            let (p00, p01) = (point(i, j), point(i, j + 1));
            let (p10, p11) = (point(i + 1, j), point(i + 1, j + 1));
            let out = (p00.coords + p01.coords + p10.coords + p11.coords) / 4.0;
            if i == 0 {
                b.triangle(p00, p10, p11, out);
            } else if i + 1 == stacks {
                b.triangle(p00, p01, p10, out);
            } else {
                b.quad(p00, p01, p11, p10, out);
            }
        }
    }
    b.finish()
}

/// Axis along z, centred on the origin, caps fanned from their centres.
pub(crate) fn cylinder(radius: f64, height: f64, n: usize) -> TriangleMesh {
    let rings = cylinder_rings(radius, height, n);
    let z = |k: usize| -height / 2.0 + height * k as f64 / rings as f64;
    let mut b = SoupBuilder::new();
    for k in 0..rings {
        for j in 0..n {
            let a = ring_point(radius, j, n, z(k));
            let c = ring_point(radius, j + 1, n, z(k + 1));
            let out = Vector3::new(a.x + c.x, a.y + c.y, 0.0);
            b.quad(a, ring_point(radius, j + 1, n, z(k)), c, ring_point(radius, j, n, z(k + 1)), out);
        }
    }
    for (k, sign) in [(0, -1.0), (rings, 1.0)] {
        let centre = Point3::new(0.0, 0.0, z(k));
        for j in 0..n {
            b.triangle(
                centre,
                ring_point(radius, j, n, z(k)),
                ring_point(radius, j + 1, n, z(k)),
                Vector3::z() * sign,
            );
        }
    }
    b.finish()
}

/// Around the z axis, centred on the origin.
pub(crate) fn torus(major: f64, minor: f64, n: usize) -> TriangleMesh {
    let m = tube_segments(n, major, minor);
    let point = |j: usize, k: usize| {
        let v = TAU * (k % m) as f64 / m as f64;
        ring_point(major + minor * v.cos(), j, n, minor * v.sin())
    };
    let mut b = SoupBuilder::new();
    for j in 0..n {
        for k in 0..m {
            let quad = [point(j, k), point(j + 1, k), point(j + 1, k + 1), point(j, k + 1)];
            let c = quad.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / 4.0;
            let axial = Vector3::new(c.x, c.y, 0.0).normalize() * major;
            b.quad(quad[0], quad[1], quad[2], quad[3], c - axial);
        }
    }
    b.finish()
}

/// Every face is an `r × r` grid on a shared lattice so edges weld exactly.
pub(crate) fn cuboid(extents: [f64; 3], r: usize) -> TriangleMesh {
    let coord = |axis: usize, i: usize| -extents[axis] / 2.0 + extents[axis] * i as f64 / r as f64;
    let mut b = SoupBuilder::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for (level, sign) in [(0, -1.0), (r, 1.0)] {
            let mut out = Vector3::zeros();
            out[axis] = sign;
            let at = |i: usize, j: usize| {
                let mut p = Point3::origin();
                p[axis] = coord(axis, level);
                p[u] = coord(u, i);
                p[v] = coord(v, j);
                p
            };
            for i in 0..r {
                for j in 0..r {
                    b.quad(at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), out);
                }
            }
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_io::{diagnostics, signed_volume, surface_area, VolumePolicy};

    #[test]
    fn icosahedron_base_is_outward() {
        let mesh = icosphere(1.0, 0);
        assert!(diagnostics(&mesh).is_watertight);
        // regular icosahedron of circumradius 1: V = (4/3)·... via edge length
        let edge = (mesh.vertices()[0] - mesh.vertices()[11]).norm();
        let expected = 5.0 / 12.0 * (3.0 + 5f64.sqrt()) * edge.powi(3);
        let v = signed_volume(&mesh, VolumePolicy::default()).unwrap().mm3;
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn level_one_area_matches_single_face_oracle() {
        // All twenty faces are congruent: subdivide one unit face by hand.
        let s = 1.0 / 5f64.sqrt();
        let a = Vector3::new(0.0, 0.0, 1.0);
        let b = Vector3::new(2.0 * s, 0.0, s);
        let c = Vector3::new(2.0 * s * (TAU / 5.0).cos(), 2.0 * s * (TAU / 5.0).sin(), s);
        let mid = |p: Vector3<f64>, q: Vector3<f64>| (p + q).normalize();
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        let area = |p: Vector3<f64>, q: Vector3<f64>, r: Vector3<f64>| 0.5 * (q - p).cross(&(r - p)).norm();
        let face = area(a, ab, ca) + area(b, bc, ab) + area(c, ca, bc) + area(ab, bc, ca);
        let expected = 20.0 * face * 225.0;
        let measured = surface_area(&icosphere(15.0, 1));
        assert!((measured - expected).abs() < 1e-9 * expected);
        let qs = measured / (4.0 * PI * 225.0);
        assert!((qs - 0.928_345_323_381_442_3).abs() < 1e-12, "{qs}");
    }

    #[test]
    fn uv_sphere_has_single_pole_vertices() {
        let mesh = uv_sphere(15.0, 7);
        // 2 poles + (stacks-1) rings of 2·stacks
        assert_eq!(mesh.vertex_count(), 2 + 6 * 14);
    }

    #[test]
    fn cuboid_vertex_count() {
        let mesh = cuboid([1.0, 2.0, 3.0], 3);
        // (r+1)³ − (r−1)³ lattice points lie on the surface
        assert_eq!(mesh.vertex_count(), 64 - 8);
    }
}
