use std::collections::HashMap;

use nalgebra::Vector3;
use petgraph::unionfind::UnionFind;

use super::{DetectedFeature, FeatureError, FeatureInstance, FeatureKind};
use crate::mesh_io::{
    edge_key, surface_area, triangle_area, triangle_normal, vertex_classes, TriangleMesh,
    DEFAULT_WELD_TOLERANCE_MM,
};

pub const DEFAULT_OVERHANG_THRESHOLD_DEG: f64 = 45.0;

/// Downward facets whose corners all lie this close to the lowest point rest
/// on the build plate.
const PLATE_CONTACT_TOLERANCE_MM: f64 = 1e-3;

/// Floor for reported angles so perfectly horizontal ceilings still carry a
/// positive dimension.
const MIN_REPORTED_ANGLE_DEG: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct OverhangDetection {
    /// One entry per edge-connected group of flagged facets.
    pub clusters: Vec<DetectedFeature>,
    pub flagged_area_mm2: f64,
    pub total_area_mm2: f64,
    pub warnings: Vec<String>,
}

impl OverhangDetection {
    pub fn support_area_ratio(&self) -> f64 {
        if self.total_area_mm2 > 0.0 {
            (self.flagged_area_mm2 / self.total_area_mm2).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

/// Flags facets whose outward normal lies within `90° − threshold` of the
/// downward direction, excluding facets resting on the build plate, and
/// groups them by shared edges.
///
/// Each cluster's dimension is its smallest facet-to-horizontal angle in
/// degrees, so a ceiling reads near 0° and a steep wall near 90°.
pub fn detect_overhangs(
    mesh: &TriangleMesh,
    build_direction: Vector3<f64>,
    threshold_deg: f64,
) -> Result<OverhangDetection, FeatureError> {
    if !(threshold_deg > 0.0 && threshold_deg <= 90.0) {
        return Err(FeatureError::InvalidThreshold(threshold_deg));
    }
    let len = build_direction.norm();
    if !(len > 0.0 && len.is_finite()) {
        return Err(FeatureError::InvalidBuildDirection);
    }
    let mut warnings = Vec::new();
    if (len - 1.0).abs() > 1e-9 {
        let msg = format!("build direction had length {len}; normalized");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let up = build_direction / len;
    let total_area_mm2 = surface_area(mesh);

    let mut flagged: Vec<(usize, f64)> = Vec::new();
    if threshold_deg < 90.0 && !mesh.is_empty() {
        let cos_limit = threshold_deg.to_radians().sin();
        let lowest = mesh
            .vertices()
            .iter()
            .map(|v| v.coords.dot(&up))
            .fold(f64::INFINITY, f64::min);
        for t in 0..mesh.triangle_count() {
            let corners = mesh.corners(t);
            let Some(n) = triangle_normal(&corners) else { continue };
            let c = -n.dot(&up);
            if c <= cos_limit {
                continue;
            }
            if corners
                .iter()
                .all(|v| v.coords.dot(&up) - lowest <= PLATE_CONTACT_TOLERANCE_MM)
            {
                continue;
            }
            flagged.push((t, c.clamp(-1.0, 1.0).acos().to_degrees()));
        }
    }

    let clusters = cluster_by_edges(mesh, &flagged)
        .into_iter()
        .enumerate()
        .map(|(k, members)| {
            let worst = members
                .iter()
                .map(|&(_, angle)| angle)
                .fold(f64::INFINITY, f64::min)
                .max(MIN_REPORTED_ANGLE_DEG);
            let triangles: Vec<usize> = members.iter().map(|&(t, _)| t).collect();
            DetectedFeature {
                instance: FeatureInstance::new(FeatureKind::Overhang, worst, format!("overhang_{}", k + 1)),
                area_mm2: triangles.iter().map(|&t| triangle_area(&mesh.corners(t))).sum(),
                triangles,
            }
        })
        .collect::<Vec<_>>();
    let flagged_area_mm2 = clusters.iter().map(|c| c.area_mm2).sum();
    Ok(OverhangDetection {
        clusters,
        flagged_area_mm2,
        total_area_mm2,
        warnings,
    })
}

/// Area needing support over total surface area.
pub fn support_area_ratio(
    mesh: &TriangleMesh,
    build_direction: Vector3<f64>,
    threshold_deg: f64,
) -> Result<f64, FeatureError> {
    Ok(detect_overhangs(mesh, build_direction, threshold_deg)?.support_area_ratio())
}

/// Groups `(triangle, value)` items whose triangles share an edge after
/// welding. Groups come out ordered by their first triangle, members
/// ascending.
pub(crate) fn cluster_by_edges<T: Copy>(mesh: &TriangleMesh, items: &[(usize, T)]) -> Vec<Vec<(usize, T)>> {
    let classes = vertex_classes(mesh, DEFAULT_WELD_TOLERANCE_MM);
    let mut sets = UnionFind::<usize>::new(items.len());
    let mut first_on_edge: HashMap<(u32, u32), usize> = HashMap::new();
    for (k, &(t, _)) in items.iter().enumerate() {
        let [a, b, c] = mesh.triangles()[t].map(|v| classes[v as usize]);
        for (u, v) in [(a, b), (b, c), (c, a)] {
            if u == v {
                continue;
            }
            match first_on_edge.get(&edge_key(u, v)) {
                Some(&other) => {
                    sets.union(k, other);
                }
                None => {
                    first_on_edge.insert(edge_key(u, v), k);
                }
            }
        }
    }
    group(items, &mut sets)
}

pub(crate) fn group<T: Copy>(items: &[(usize, T)], sets: &mut UnionFind<usize>) -> Vec<Vec<(usize, T)>> {
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<Vec<(usize, T)>> = Vec::new();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&k| items[k].0);
    for k in order {
        let root = sets.find_mut(k);
        let slot = *by_root.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(items[k]);
    }
    groups
}
