use std::collections::{BTreeSet, HashMap};

use nalgebra::Point3;
use petgraph::unionfind::UnionFind;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bvh::Bvh;
use super::{DetectedFeature, FeatureError, FeatureInstance, FeatureKind};
use crate::mesh_io::{edge_key, triangle_area, triangle_normal, vertex_classes, TriangleMesh, DEFAULT_WELD_TOLERANCE_MM};

/// Hits closer than this to the ray origin are the origin surface itself.
const SELF_HIT_DISTANCE_MM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinRegionOptions {
    pub sample_count: usize,
    pub thickness_cap_mm: f64,
    pub seed: u64,
}

impl Default for ThinRegionOptions {
    fn default() -> Self {
        Self {
            sample_count: 10_000,
            thickness_cap_mm: 2.0,
            seed: 42,
        }
    }
}

/// Estimates local wall thickness by casting inward rays from area-weighted
/// surface samples, then reports every connected region thinner than the cap
/// as an `unsupported_wall` with its minimum measured thickness.
///
/// A sample links its own facet with the facet its ray exits through, so both
/// faces of a wall end up in one region. Results are ordered by thickness.
pub fn detect_thin_regions(
    mesh: &TriangleMesh,
    options: &ThinRegionOptions,
) -> Result<Vec<DetectedFeature>, FeatureError> {
    if !(options.thickness_cap_mm > 0.0 && options.thickness_cap_mm.is_finite()) {
        return Err(FeatureError::InvalidThicknessCap(options.thickness_cap_mm));
    }
    let areas: Vec<f64> = (0..mesh.triangle_count())
        .map(|t| triangle_area(&mesh.corners(t)))
        .collect();
    let Ok(pick) = WeightedIndex::new(&areas) else {
        return Ok(Vec::new());
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let samples: Vec<(usize, Point3<f64>)> = (0..options.sample_count)
        .map(|_| {
            let t = pick.sample(&mut rng);
            let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
            let s = r1.sqrt();
            let [a, b, c] = mesh.corners(t);
            let p = a.coords * (1.0 - s) + b.coords * (s * (1.0 - r2)) + c.coords * (s * r2);
            (t, Point3::from(p))
        })
        .collect();

    let bvh = Bvh::build(mesh);
    let thin: Vec<(usize, usize, f64)> = samples
        .par_iter()
        .filter_map(|&(t, p)| {
            let n = triangle_normal(&mesh.corners(t))?;
            let (hit, depth) = bvh.first_hit(&p, &-n, SELF_HIT_DISTANCE_MM, t)?;
            (depth < options.thickness_cap_mm).then_some((t, hit, depth))
        })
        .collect();
    if thin.is_empty() {
        return Ok(Vec::new());
    }

    // Per-facet minimum thickness over every sample touching it.
    let mut depth_of: HashMap<usize, f64> = HashMap::new();
    for &(t, hit, depth) in &thin {
        for f in [t, hit] {
            let e = depth_of.entry(f).or_insert(depth);
            *e = e.min(depth);
        }
    }
    let facets: Vec<(usize, f64)> = {
        let mut v: Vec<_> = depth_of.into_iter().collect();
        v.sort_by_key(|&(t, _)| t);
        v
    };
    let slot: HashMap<usize, usize> = facets.iter().enumerate().map(|(k, &(t, _))| (t, k)).collect();

    let mut sets = UnionFind::<usize>::new(facets.len());
    for &(t, hit, _) in &thin {
        sets.union(slot[&t], slot[&hit]);
    }
    let classes = vertex_classes(mesh, DEFAULT_WELD_TOLERANCE_MM);
    let mut first_on_edge: HashMap<(u32, u32), usize> = HashMap::new();
    for (k, &(t, _)) in facets.iter().enumerate() {
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

    let mut regions: Vec<(f64, Vec<usize>)> = super::overhang::group(&facets, &mut sets)
        .into_iter()
        .map(|members| {
            let d = members.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
            let tris: BTreeSet<usize> = members.iter().map(|&(t, _)| t).collect();
            (d, tris.into_iter().collect())
        })
        .collect();
    regions.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1[0].cmp(&b.1[0])));

    Ok(regions
        .into_iter()
        .enumerate()
        .map(|(k, (d, triangles))| DetectedFeature {
            instance: FeatureInstance::new(FeatureKind::UnsupportedWall, d, format!("thin_wall_{}", k + 1)),
            area_mm2: triangles.iter().map(|&t| areas[t]).sum(),
            triangles,
        })
        .collect())
}
