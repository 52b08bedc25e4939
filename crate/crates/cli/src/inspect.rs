use std::path::PathBuf;

use clap::Args;
use printscore::mesh_io::{
    bounding_box, diagnostics, signed_volume, surface_area, BoundingBox, MeshDiagnostics, VolumePolicy,
};
use printscore::metrics::{mesh_complexity, quality_ratio, QualityRatio};
use serde::Serialize;

use crate::failure::{Classify, CmdResult};
use crate::output::{emit_json, emit_text, num, nums, Format, OUTPUT_SCHEMA_VERSION};
use crate::{load, Context};

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// STL file.
    mesh: PathBuf,

    /// Area of the exact surface in mm²; adds the quality ratio to the report.
    #[arg(long, allow_negative_numbers = true)]
    reference_area: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Volume {
    mm3: f64,
    m3: f64,
}

#[derive(Debug, Serialize)]
struct InspectReport {
    schema_version: u32,
    command: &'static str,
    input: String,
    triangle_count: usize,
    vertex_count: usize,
    area_mm2: f64,
    /// Absent when the mesh is not closed.
    volume: Option<Volume>,
    bbox: Option<BoundingBox>,
    extents_mm: Option<[f64; 3]>,
    diagnostics: MeshDiagnostics,
    quality: Option<QualityRatio>,
    warnings: Vec<String>,
}

pub fn run(ctx: &Context, args: InspectArgs) -> CmdResult {
    let format = ctx.format.report_only()?;
    let quality_reference = args.reference_area;
    let mesh = load::mesh(&args.mesh)?;
    let mut warnings = Vec::new();
    let volume = match signed_volume(&mesh, VolumePolicy::RequireWatertight) {
        Ok(v) => Some(Volume { mm3: v.mm3, m3: v.m3() }),
        Err(e) => {
            warnings.push(format!("volume unavailable: {e}"));
            None
        }
    };
    let bbox = bounding_box(&mesh).ok();
    let area = surface_area(&mesh);
    let quality = quality_reference.map(|a| quality_ratio(&mesh, a)).transpose().usage()?;
    let report = InspectReport {
        schema_version: OUTPUT_SCHEMA_VERSION,
        command: "inspect",
        input: args.mesh.display().to_string(),
        triangle_count: mesh_complexity(&mesh),
        vertex_count: mesh.vertex_count(),
        area_mm2: area,
        volume,
        extents_mm: bbox.map(|b| b.extents()),
        bbox,
        diagnostics: diagnostics(&mesh),
        quality,
        warnings,
    };
    match format {
        Format::Json => emit_json(&report),
        _ => emit_text(&text(&report)),
    }
}

fn text(r: &InspectReport) -> String {
    let d = &r.diagnostics;
    let mut out = format!("input: {}\n", r.input);
    out += &format!("triangles: {}\nvertices: {}\n", r.triangle_count, r.vertex_count);
    out += &format!("area_mm2: {}\n", num(r.area_mm2));
    match &r.volume {
        Some(v) => out += &format!("volume_mm3: {}\nvolume_m3: {}\n", num(v.mm3), num(v.m3)),
        None => out += "volume: unavailable\n",
    }
    if let (Some(b), Some(e)) = (&r.bbox, &r.extents_mm) {
        out += &format!("bbox_min: {}\nbbox_max: {}\nextents_mm: {}\n", nums(&b.min), nums(&b.max), nums(e));
    }
    out += &format!(
        "watertight: {}\nboundary_edges: {}\nnon_manifold_edges: {}\ndegenerate_triangles: {}\nduplicate_vertices: {}\n",
        d.is_watertight, d.boundary_edge_count, d.non_manifold_edge_count, d.degenerate_triangle_count, d.duplicate_vertex_count
    );
    if let Some(q) = &r.quality {
        out += &format!("reference_area_mm2: {}\nqs: {}\n", num(q.area_reference), num(q.qs));
    }
    for w in &r.warnings {
        out += &format!("warning: {w}\n");
    }
    out
}
