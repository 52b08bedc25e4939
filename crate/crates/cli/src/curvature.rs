use std::path::PathBuf;

use clap::builder::TypedValueParser as _;
use clap::Args;
use printscore::metrics::{curvature_histogram, mean_curvature, Mode, SummaryStats, DEFAULT_BINS};
use serde::Serialize;

use crate::failure::{Classify, CmdResult};
use crate::output::{emit_json, emit_text, num, Format, OUTPUT_SCHEMA_VERSION};
use crate::{load, Context};

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// STL file.
    mesh: PathBuf,

    /// Number of histogram bins.
    #[arg(long, default_value_t = DEFAULT_BINS, value_parser = clap::value_parser!(u32).range(1..).map(|b| b as usize))]
    bins: usize,
}

#[derive(Debug, Serialize)]
struct CurvatureReport {
    schema_version: u32,
    command: &'static str,
    input: String,
    bins: usize,
    edges: Vec<f64>,
    counts: Vec<u64>,
    stats: SummaryStats,
    modes: Vec<Mode>,
    bimodal: bool,
}

pub fn run(ctx: &Context, args: CurvatureArgs) -> CmdResult {
    let mesh = load::mesh(&args.mesh)?;
    let field = mean_curvature(&mesh).usage()?;
    let hist = curvature_histogram(&field, args.bins).usage()?;
    if ctx.format == Format::Csv {
        return emit_text(&hist.to_csv());
    }
    let modes = hist.modes();
    let report = CurvatureReport {
        schema_version: OUTPUT_SCHEMA_VERSION,
        command: "curvature",
        input: args.mesh.display().to_string(),
        bins: hist.bins(),
        bimodal: modes.len() >= 2,
        modes,
        stats: hist.stats,
        edges: hist.edges,
        counts: hist.counts,
    };
    match ctx.format {
        Format::Json => emit_json(&report),
        _ => emit_text(&text(&report)),
    }
}

fn text(r: &CurvatureReport) -> String {
    let s = &r.stats;
    let mut out = format!("input: {}\nvertices: {}\n", r.input, s.count);
    out += &format!(
        "mean_curvature min {} max {} mean {} median {}\n",
        num(s.min),
        num(s.max),
        num(s.mean),
        num(s.median)
    );
    out += &format!("bins: {}\nmodes: {}\nbimodal: {}\n", r.bins, r.modes.len(), r.bimodal);
    for m in &r.modes {
        out += &format!("  mode bin {} centre {} count {}\n", m.bin, num(m.centre), m.count);
    }
    out
}
