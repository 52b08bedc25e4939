use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use printscore::features::{save_manifest, FeatureManifest};
use printscore::mesh_io::{write_stl, StlFormat, TriangleMesh};
use printscore::primitives::{
    gen_benchmark, gen_primitive, AnalyticMeasures, BenchmarkSpec, PrimitiveKind, PrimitiveSpec,
    DEFAULT_MAX_TRIANGLES,
};
use serde::Serialize;

use crate::failure::{Classify, CmdResult, Failure};
use crate::output::{emit_json, emit_text, num, Format, OUTPUT_SCHEMA_VERSION};
use crate::values::floats;
use crate::Context;

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    shape: Shape,

    /// STL path; defaults to `<shape>.stl` in the working directory.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Manifest path; defaults to the STL path with a `.manifest.json` suffix.
    #[arg(long, global = true)]
    manifest_out: Option<PathBuf>,

    /// Write ASCII instead of binary STL.
    #[arg(long, global = true)]
    ascii: bool,

    /// Refuse resolutions that would exceed this many triangles.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TRIANGLES)]
    max_triangles: u64,
}

#[derive(Debug, Subcommand)]
enum Shape {
    /// Icosphere by default; `--stacks` switches to a latitude/longitude grid.
    Sphere {
        #[arg(long, allow_negative_numbers = true)]
        diameter: f64,
        /// Icosphere subdivision level (20·4^level triangles).
        #[arg(long, conflicts_with = "stacks")]
        level: Option<u32>,
        /// UV-sphere stack count (slices = 2·stacks).
        #[arg(long)]
        stacks: Option<u32>,
    },
    Cylinder {
        #[arg(long, allow_negative_numbers = true)]
        diameter: f64,
        #[arg(long, allow_negative_numbers = true)]
        height: f64,
        /// 4·2^resolution segments around the axis.
        #[arg(long, default_value_t = 4)]
        resolution: u32,
    },
    Torus {
        #[arg(long, allow_negative_numbers = true)]
        major_radius: f64,
        #[arg(long, allow_negative_numbers = true)]
        minor_radius: f64,
        #[arg(long, default_value_t = 4)]
        resolution: u32,
    },
    /// Rectangular box with each face split into a resolution × resolution grid.
    Box {
        /// Edge lengths as `x,y,z`.
        #[arg(long, value_parser = floats::<3>, allow_hyphen_values = true)]
        extents: [f64; 3],
        #[arg(long, default_value_t = 1)]
        resolution: u32,
    },
    /// Feature-ladder plate; ladders are comma-separated, in mm or degrees.
    Benchmark(Box<BenchmarkArgs>),
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Start from a built-in layout (b1, b2 or b3); ladder flags replace its ladders.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    walls: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    unsupported_walls: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    holes: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    bridges: Option<Vec<f64>>,
    /// Fin angles from horizontal, degrees.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    overhangs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    emboss: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    engrave: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pins: Option<Vec<f64>>,
    /// Hemisphere radii.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    domes: Option<Vec<f64>>,
    /// Plate as `length,depth,thickness`; length is fitted to the features when omitted.
    #[arg(long, value_parser = floats::<3>, allow_hyphen_values = true)]
    plate: Option<[f64; 3]>,
    /// Segments used for holes, pins and domes.
    #[arg(long)]
    segments: Option<u32>,
}

impl BenchmarkArgs {
    fn spec(self) -> Result<BenchmarkSpec, Failure> {
        let mut spec = match &self.preset {
            Some(name) => BenchmarkSpec::preset(name)
                .ok_or_else(|| Failure::usage(format!("unknown preset '{name}'; available: b1, b2, b3")))?,
            None => BenchmarkSpec::default(),
        };
        let ladders = [
            (self.walls, &mut spec.wall_thickness_ladder),
            (self.unsupported_walls, &mut spec.unsupported_wall_ladder),
            (self.holes, &mut spec.hole_diameter_ladder),
            (self.bridges, &mut spec.bridge_thickness_ladder),
            (self.overhangs, &mut spec.overhang_angle_ladder),
            (self.emboss, &mut spec.emboss_sizes),
            (self.engrave, &mut spec.engrave_sizes),
            (self.pins, &mut spec.pin_diameter_ladder),
            (self.domes, &mut spec.dome_radii),
        ];
        for (given, slot) in ladders {
            if let Some(values) = given {
                *slot = values;
            }
        }
        if let Some(n) = self.segments {
            spec.circle_segments = n;
        }
        match self.plate {
            Some(p) => spec.plate = p,
            None => spec = spec.fit_plate_length(),
        }
        Ok(spec)
    }
}

#[derive(Debug, Serialize)]
struct GenSummary {
    schema_version: u32,
    command: &'static str,
    shape: &'static str,
    mesh: String,
    manifest: String,
    triangle_count: usize,
    vertex_count: usize,
    feature_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<AnalyticMeasures>,
}

pub fn run(ctx: &Context, args: GenArgs) -> CmdResult {
    let format = ctx.format.report_only()?;
    let (name, mesh, manifest) = build(args.shape, args.max_triangles)?;
    let stl_path = args.output.unwrap_or_else(|| PathBuf::from(format!("{name}.stl")));
    let manifest_path = args.manifest_out.unwrap_or_else(|| manifest_path_for(&stl_path));
    let stl_format = if args.ascii { StlFormat::AsciiStl } else { StlFormat::BinaryStl };
    std::fs::write(&stl_path, write_stl(&mesh, stl_format))
        .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", stl_path.display()))
        .runtime()?;
    save_manifest(&manifest, &manifest_path).runtime()?;

    let summary = GenSummary {
        schema_version: OUTPUT_SCHEMA_VERSION,
        command: "gen",
        shape: name,
        mesh: stl_path.display().to_string(),
        manifest: manifest_path.display().to_string(),
        triangle_count: mesh.triangle_count(),
        vertex_count: mesh.vertex_count(),
        feature_count: manifest.len(),
        analytic: manifest.analytic,
    };
    match format {
        Format::Json => emit_json(&summary),
        _ => {
            let mut text = format!(
                "wrote {} ({} triangles, {} vertices)\nwrote {} ({} features)\n",
                summary.mesh, summary.triangle_count, summary.vertex_count, summary.manifest, summary.feature_count
            );
            if let Some(a) = summary.analytic {
                text += &format!("analytic area_mm2 {} volume_mm3 {}\n", num(a.area_mm2), num(a.volume_mm3));
            }
            emit_text(&text)
        }
    }
}

fn manifest_path_for(stl: &Path) -> PathBuf {
    let stem = stl.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    stl.with_file_name(format!("{stem}.manifest.json"))
}

fn build(shape: Shape, max_triangles: u64) -> Result<(&'static str, TriangleMesh, FeatureManifest), Failure> {
    let spec = match shape {
        Shape::Benchmark(args) => {
            let g = gen_benchmark(&args.spec()?).usage()?;
            return Ok(("benchmark", g.mesh, g.manifest));
        }
        Shape::Sphere {
            diameter,
            level,
            stacks,
        } => match stacks {
            Some(s) => PrimitiveSpec::uv_sphere(diameter, s),
            None => PrimitiveSpec::icosphere(diameter, level.unwrap_or(4)),
        },
        Shape::Cylinder {
            diameter,
            height,
            resolution,
        } => PrimitiveSpec::cylinder(diameter, height, resolution),
        Shape::Torus {
            major_radius,
            minor_radius,
            resolution,
        } => PrimitiveSpec::torus(major_radius, minor_radius, resolution),
        Shape::Box { extents, resolution } => {
            PrimitiveSpec::cuboid(extents, resolution)
        }
    };
    let spec = PrimitiveSpec { max_triangles, ..spec };
    let name = match spec.kind {
        PrimitiveKind::Sphere { .. } => "sphere",
        PrimitiveKind::Cylinder { .. } => "cylinder",
        PrimitiveKind::Torus { .. } => "torus",
        PrimitiveKind::Box { .. } => "box",
    };
    let g = gen_primitive(&spec).usage()?;
    let mut manifest = g.manifest;
    manifest.analytic = Some(g.analytic);
    Ok((name, g.mesh, manifest))
}
