//! `printscore`: generate test meshes, inspect them and score their
//! printability on additive-manufacturing technologies.

mod curvature;
mod failure;
mod gen;
mod inspect;
mod load;
mod output;
mod score;
mod values;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use failure::CmdResult;
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "printscore", version, about = "Mesh metrics and printability scores for 3D printing")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Directory searched for `<name>.json` profiles before the built-ins.
    #[arg(long, global = true, env = "PRINTSCORE_PROFILE_DIR")]
    profile_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated primitive or benchmark plate as STL plus its manifest.
    Gen(gen::GenArgs),
    /// Report size, area, volume, bounding box and topology of a mesh.
    Inspect(inspect::InspectArgs),
    /// Histogram of per-vertex mean curvature.
    Curvature(curvature::CurvatureArgs),
    /// Printability score on one technology.
    Score(score::ScoreArgs),
    /// Rank technologies by printability score.
    Compare(score::CompareArgs),
}

fn run(cli: Cli) -> CmdResult {
    let ctx = Context {
        format: cli.format,
        profile_dir: cli.profile_dir,
    };
    match cli.command {
        Command::Gen(args) => gen::run(&ctx, args),
        Command::Inspect(args) => inspect::run(&ctx, args),
        Command::Curvature(args) => curvature::run(&ctx, args),
        Command::Score(args) => score::run_score(&ctx, args),
        Command::Compare(args) => score::run_compare(&ctx, args),
    }
}

/// Settings shared by every subcommand.
#[derive(Debug)]
pub struct Context {
    pub format: Format,
    pub profile_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}
