use std::path::{Path, PathBuf};

use anyhow::Context as _;
use printscore::features::{load_manifest, FeatureError, FeatureManifest};
use printscore::mesh_io::{parse_stl, weld_vertices, TriangleMesh, DEFAULT_WELD_TOLERANCE_MM};
use printscore::scoring::{ApplicationProfile, TechnologyProfile};

use crate::failure::{Classify, Failure};

/// Reads an STL file and welds coincident corners.
pub fn mesh(path: &Path) -> Result<TriangleMesh, Failure> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .runtime()?;
    let soup = parse_stl(&bytes)
        .with_context(|| format!("cannot parse {}", path.display()))
        .runtime()?;
    Ok(weld_vertices(&soup, DEFAULT_WELD_TOLERANCE_MM))
}

pub fn manifest(path: Option<&Path>) -> Result<FeatureManifest, Failure> {
    let Some(path) = path else {
        return Ok(FeatureManifest::default());
    };
    load_manifest(path).map_err(|e| {
        let is_io = matches!(e, FeatureError::Io { .. });
        let err = anyhow::Error::new(e).context(format!("manifest {}", path.display()));
        if is_io {
            Failure::Runtime(err)
        } else {
            Failure::Usage(err)
        }
    })
}

fn profile_file(dir: Option<&Path>, name: &str) -> Option<PathBuf> {
    let path = dir?.join(format!("{name}.json"));
    path.is_file().then_some(path)
}

/// A profile file beats a same-named file in the profile directory, which
/// beats the built-in of that name.
pub fn technology(dir: Option<&Path>, name: &str, file: Option<&Path>) -> Result<TechnologyProfile, Failure> {
    if let Some(path) = file.map(Path::to_path_buf).or_else(|| profile_file(dir, name)) {
        return TechnologyProfile::load(&path)
            .with_context(|| format!("technology profile {}", path.display()))
            .usage();
    }
    TechnologyProfile::builtin(name).usage()
}

pub fn application(dir: Option<&Path>, name: &str, file: Option<&Path>) -> Result<ApplicationProfile, Failure> {
    if let Some(path) = file.map(Path::to_path_buf).or_else(|| profile_file(dir, name)) {
        return ApplicationProfile::load(&path)
            .with_context(|| format!("application profile {}", path.display()))
            .usage();
    }
    ApplicationProfile::builtin(name).usage()
}
