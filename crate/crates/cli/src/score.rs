use std::path::PathBuf;

use clap::Args;
use printscore::features::{
    detect_overhangs, detect_thin_regions, detected_manifest, FeatureManifest, ThinRegionOptions,
    DEFAULT_OVERHANG_THRESHOLD_DEG,
};
use printscore::mesh_io::{surface_area, TriangleMesh};
use printscore::metrics::{resolve_reference_area, ReferenceSource, ResolvedReference, SiblingMesh};
use printscore::scoring::{
    compare, printability, ApplicationProfile, ClassificationThresholds, PrintabilityReport, QualityInput,
    ScoreOptions, TechnologyProfile,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::failure::{Classify, CmdResult, Failure};
use crate::output::{emit_json, emit_text, num, Format, OUTPUT_SCHEMA_VERSION};
use crate::values::floats;
use crate::{load, Context};

/// Flags shared by `score` and `compare`.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Feature manifest (JSON).
    #[arg(long)]
    manifest: Option<PathBuf>,

    /// Application profile name.
    #[arg(long, default_value = "generic", conflicts_with = "app_file")]
    app: String,

    /// Application profile file; overrides `--app`.
    #[arg(long)]
    app_file: Option<PathBuf>,

    /// Exact surface area in mm² used as the quality reference.
    #[arg(long, allow_negative_numbers = true)]
    reference_area: Option<f64>,

    /// Other tessellations of the same solid; the finest supplies the reference area.
    #[arg(long = "sibling")]
    siblings: Vec<PathBuf>,

    /// Same sensitivity for every global characteristic, in [0, 1].
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,

    /// Score cut-offs as `printable,unprintable`.
    #[arg(long, value_parser = floats::<2>, allow_hyphen_values = true)]
    classify_thresholds: Option<[f64; 2]>,

    /// Degrees per logistic unit for angular features.
    #[arg(long, allow_negative_numbers = true)]
    steepness: Option<f64>,

    /// Add detected overhangs and thin regions to the manifest.
    #[arg(long)]
    detect: bool,

    /// Build direction as `x,y,z` for overhang detection.
    #[arg(long, value_parser = floats::<3>, default_value = "0,0,1", allow_hyphen_values = true)]
    build_dir: [f64; 3],

    /// Overhang threshold in degrees for detection.
    #[arg(long, default_value_t = DEFAULT_OVERHANG_THRESHOLD_DEG)]
    overhang_threshold: f64,

    /// Thickness below which a region counts as thin, mm.
    #[arg(long, default_value_t = ThinRegionOptions::default().thickness_cap_mm)]
    thickness_cap: f64,

    /// Surface samples for thin-region detection.
    #[arg(long, default_value_t = ThinRegionOptions::default().sample_count)]
    samples: usize,

    /// Seed for every randomized step.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// STL file.
    #[arg(required_unless_present = "inputs", conflicts_with = "inputs")]
    mesh: Option<PathBuf>,

    /// Glob of STL files scored as a batch, in sorted path order.
    #[arg(long)]
    inputs: Option<String>,

    /// Treat the batch as tessellations of one solid, so the finest input is
    /// the reference for all of them.
    #[arg(long, requires = "inputs")]
    same_solid: bool,

    /// Technology profile name.
    #[arg(long, default_value = "fdm", conflicts_with = "tech_file")]
    tech: String,

    /// Technology profile file; overrides `--tech`.
    #[arg(long)]
    tech_file: Option<PathBuf>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// STL file.
    mesh: PathBuf,

    /// `all` or a comma-separated list of technology names.
    #[arg(long, default_value = "all")]
    techs: String,

    /// Additional technology profile files.
    #[arg(long = "tech-file")]
    tech_files: Vec<PathBuf>,

    #[command(flatten)]
    common: CommonArgs,
}

impl CommonArgs {
    fn options(&self) -> Result<ScoreOptions, Failure> {
        let classification = match &self.classify_thresholds {
            Some(t) => ClassificationThresholds::new(t[0], t[1]).usage()?,
            None => ClassificationThresholds::default(),
        };
        let options = ScoreOptions {
            k_override: self.k,
            classification,
            steepness_deg: self.steepness,
        };
        options.validate().usage()?;
        Ok(options)
    }

    fn declared_manifest(&self) -> Result<FeatureManifest, Failure> {
        load::manifest(self.manifest.as_deref())
    }

    fn application(&self, ctx: &Context) -> Result<ApplicationProfile, Failure> {
        load::application(ctx.profile_dir.as_deref(), &self.app, self.app_file.as_deref())
    }

    /// Declared features, plus detector output when `--detect` is set.
    fn manifest_for(&self, declared: &FeatureManifest, mesh: &TriangleMesh) -> Result<FeatureManifest, Failure> {
        if !self.detect {
            return Ok(declared.clone());
        }
        let up = nalgebra::Vector3::new(self.build_dir[0], self.build_dir[1], self.build_dir[2]);
        let overhangs = detect_overhangs(mesh, up, self.overhang_threshold).usage()?;
        for w in &overhangs.warnings {
            log::warn!("overhang detection: {w}");
        }
        let thin = detect_thin_regions(
            mesh,
            &ThinRegionOptions {
                sample_count: self.samples,
                thickness_cap_mm: self.thickness_cap,
                seed: self.seed,
            },
        )
        .usage()?;
        let found: Vec<_> = overhangs.clusters.into_iter().chain(thin).collect();
        declared.union(&detected_manifest(&found).usage()?).usage()
    }
}

/// Quality ratio of a mesh and where its reference came from.
struct Quality {
    qs: f64,
    reference: Option<ResolvedReference>,
    warning: Option<String>,
}

fn quality(
    mesh: &TriangleMesh,
    user: Option<f64>,
    manifest: &FeatureManifest,
    siblings: &[SiblingMesh<'_>],
) -> Result<Quality, Failure> {
    if let Some(a) = user {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Failure::usage(format!("reference area must be positive, got {a}")));
        }
    }
    let analytic = manifest.analytic.map(|a| a.area_mm2);
    match resolve_reference_area(user, analytic, siblings) {
        Some(r) => Ok(Quality {
            qs: surface_area(mesh) / r.area_mm2,
            reference: Some(r),
            warning: None,
        }),
        None => Ok(Quality {
            qs: 1.0,
            reference: None,
            warning: Some("no reference area available; assuming quality ratio 1".to_owned()),
        }),
    }
}

fn finish(mut report: PrintabilityReport, q: &Quality) -> PrintabilityReport {
    if let Some(w) = &q.warning {
        report.warnings.insert(0, w.clone());
    }
    report.with_reference(q.reference.clone())
}

#[derive(Debug, Serialize)]
struct ScoreEntry {
    input: String,
    report: PrintabilityReport,
}

#[derive(Debug, Serialize)]
struct ScoreOutput {
    schema_version: u32,
    command: &'static str,
    results: Vec<ScoreEntry>,
}

fn batch_paths(pattern: &str) -> Result<Vec<PathBuf>, Failure> {
    let mut paths = glob::glob(pattern)
        .map_err(|e| Failure::usage(format!("bad glob '{pattern}': {e}")))?
        .collect::<Result<Vec<_>, _>>()
        .runtime()?;
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::usage(format!("no files match '{pattern}'")));
    }
    Ok(paths)
}

pub fn run_score(ctx: &Context, args: ScoreArgs) -> CmdResult {
    let format = ctx.format.report_only()?;
    let common = &args.common;
    let options = common.options()?;
    let tech = load::technology(ctx.profile_dir.as_deref(), &args.tech, args.tech_file.as_deref())?;
    let app = common.application(ctx)?;
    let declared = common.declared_manifest()?;

    let paths = match (&args.mesh, &args.inputs) {
        (Some(p), _) => vec![p.clone()],
        (None, Some(pattern)) => batch_paths(pattern)?,
        (None, None) => return Err(Failure::usage("give a mesh path or --inputs")),
    };
    let meshes = paths
        .par_iter()
        .map(|p| load::mesh(p))
        .collect::<Result<Vec<_>, _>>()?;
    let extra = common
        .siblings
        .iter()
        .map(|p| load::mesh(p))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    let extra_labels: Vec<String> = common.siblings.iter().map(|p| p.display().to_string()).collect();
    let extra: Vec<SiblingMesh<'_>> = extra
        .iter()
        .zip(&extra_labels)
        .map(|(mesh, label)| SiblingMesh { label, mesh })
        .collect();
    let batch: Vec<SiblingMesh<'_>> = meshes
        .iter()
        .zip(&labels)
        .map(|(mesh, label)| SiblingMesh { label, mesh })
        .collect();

    let results = meshes
        .par_iter()
        .zip(&paths)
        .enumerate()
        .map(|(i, (mesh, path))| {
            let manifest = common.manifest_for(&declared, mesh)?;
            // the scored mesh joins the pool only when there is something to compare it with
            let pool: Vec<SiblingMesh<'_>> = if args.same_solid {
                batch.iter().chain(&extra).copied().collect()
            } else if extra.is_empty() {
                Vec::new()
            } else {
                batch[i..=i].iter().chain(&extra).copied().collect()
            };
            let q = quality(mesh, common.reference_area, &manifest, &pool)?;
            let report = printability(q.qs, &manifest, &tech, &app, &options).usage()?;
            Ok(ScoreEntry {
                input: path.display().to_string(),
                report: finish(report, &q),
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let out = ScoreOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        command: "score",
        results,
    };
    match format {
        Format::Json => emit_json(&out),
        _ => emit_text(
            &out.results
                .iter()
                .map(|e| report_text(&e.input, &e.report))
                .collect::<Vec<_>>()
                .join("\n"),
        ),
    }
}

#[derive(Debug, Serialize)]
struct CompareOutput {
    schema_version: u32,
    command: &'static str,
    input: String,
    application: String,
    ranking: Vec<PrintabilityReport>,
}

fn technologies(ctx: &Context, args: &CompareArgs) -> Result<Vec<TechnologyProfile>, Failure> {
    let dir = ctx.profile_dir.as_deref();
    let mut techs = if args.techs.trim().eq_ignore_ascii_case("all") {
        TechnologyProfile::builtins()
    } else {
        args.techs
            .split(',')
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .map(|n| load::technology(dir, n, None))
            .collect::<Result<Vec<_>, _>>()?
    };
    for path in &args.tech_files {
        techs.push(load::technology(dir, "", Some(path))?);
    }
    if techs.is_empty() {
        return Err(Failure::usage("no technologies selected"));
    }
    Ok(techs)
}

pub fn run_compare(ctx: &Context, args: CompareArgs) -> CmdResult {
    let format = ctx.format.report_only()?;
    let common = &args.common;
    let options = common.options()?;
    let techs = technologies(ctx, &args)?;
    let app = common.application(ctx)?;
    let declared = common.declared_manifest()?;
    let mesh = load::mesh(&args.mesh)?;
    let extra = common
        .siblings
        .iter()
        .map(|p| load::mesh(p))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<String> = common.siblings.iter().map(|p| p.display().to_string()).collect();
    let mut siblings: Vec<SiblingMesh<'_>> = extra
        .iter()
        .zip(&labels)
        .map(|(mesh, label)| SiblingMesh { label, mesh })
        .collect();
    let input = args.mesh.display().to_string();
    if !siblings.is_empty() {
        siblings.insert(0, SiblingMesh { label: &input, mesh: &mesh });
    }

    let manifest = common.manifest_for(&declared, &mesh)?;
    let q = quality(&mesh, common.reference_area, &manifest, &siblings)?;
    let ranking = compare(&QualityInput::Shared(q.qs), &manifest, &techs, &app, &options)
        .usage()?
        .into_iter()
        .map(|r| finish(r, &q))
        .collect();
    let out = CompareOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        command: "compare",
        input,
        application: app.name.clone(),
        ranking,
    };
    match format {
        Format::Json => emit_json(&out),
        _ => emit_text(&compare_text(&out)),
    }
}

fn reference_text(r: &Option<ResolvedReference>) -> String {
    match r {
        None => "none".to_owned(),
        Some(r) => {
            let source = match &r.source {
                ReferenceSource::User => "flag".to_owned(),
                ReferenceSource::Analytic => "analytic".to_owned(),
                ReferenceSource::Sibling { label, triangle_count } => {
                    format!("sibling {label} ({triangle_count} triangles)")
                }
            };
            format!("{} mm2 from {source}", num(r.area_mm2))
        }
    }
}

fn report_text(input: &str, r: &PrintabilityReport) -> String {
    let mut out = format!("input: {input}\n");
    out += &format!("technology: {}\napplication: {}\n", r.technology, r.provenance.application);
    out += &format!("qs: {}\nreference: {}\n", num(r.qs), reference_text(&r.provenance.reference));
    for t in &r.defect_scores {
        out += &format!(
            "  {:<22} ds_perfect {} ds {} k {}\n",
            t.characteristic.as_str(),
            num(t.ds_perfect),
            num(t.ds),
            num(t.k)
        );
    }
    out += &format!("p_global_success: {}\n", num(r.p_global_success));
    if !r.features.is_empty() {
        out += "features:\n";
        for f in &r.features {
            out += &format!(
                "  {:<20} {:<18} d {} w {} s {} p_flaw {}\n",
                f.label,
                f.kind.as_str(),
                num(f.d),
                num(f.w),
                num(f.s),
                num(f.p_flaw)
            );
        }
    }
    out += &format!("p_success: {}\n", num(r.p_success));
    out += &format!("score: {}\nclassification: {}\n", num(r.score), classification_name(r));
    for w in &r.warnings {
        out += &format!("warning: {w}\n");
    }
    out
}

fn classification_name(r: &PrintabilityReport) -> String {
    serde_json::to_value(r.classification)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn compare_text(out: &CompareOutput) -> String {
    let mut text = format!("input: {}\napplication: {}\n", out.input, out.application);
    if let Some(first) = out.ranking.first() {
        text += &format!("qs: {}\nreference: {}\n", num(first.qs), reference_text(&first.provenance.reference));
    }
    text += &format!("{:<5} {:<20} {:<22} {:<22} {}\n", "rank", "technology", "score", "p_global_success", "class");
    for (i, r) in out.ranking.iter().enumerate() {
        text += &format!(
            "{:<5} {:<20} {:<22} {:<22} {}\n",
            i + 1,
            r.technology,
            num(r.score),
            num(r.p_global_success),
            classification_name(r)
        );
    }
    if let Some(first) = out.ranking.first() {
        for w in &first.warnings {
            text += &format!("warning: {w}\n");
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use printscore::primitives::{gen_primitive, PrimitiveSpec};

    #[test]
    fn reference_precedence_and_fallback() {
        let g = gen_primitive(&PrimitiveSpec::icosphere(30.0, 2)).unwrap();
        let mut manifest = FeatureManifest::default();
        let none = quality(&g.mesh, None, &manifest, &[]).unwrap();
        assert_eq!(none.qs, 1.0);
        assert!(none.warning.is_some());

        manifest.analytic = Some(g.analytic);
        let analytic = quality(&g.mesh, None, &manifest, &[]).unwrap();
        assert!(analytic.qs < 1.0);
        assert_eq!(analytic.reference.unwrap().source, ReferenceSource::Analytic);

        let flag = quality(&g.mesh, Some(surface_area(&g.mesh)), &manifest, &[]).unwrap();
        assert_eq!(flag.qs, 1.0);
        assert!(quality(&g.mesh, Some(-1.0), &manifest, &[]).is_err());
    }

    #[test]
    fn batch_glob_rejects_empty_match() {
        let dir = std::env::temp_dir().join("printscore-no-such-dir-for-glob");
        let pattern = format!("{}/*.stl", dir.display());
        assert!(matches!(batch_paths(&pattern), Err(Failure::Usage(_))));
    }
}
