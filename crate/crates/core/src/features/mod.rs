//! Part characteristics: the manifest format that feeds scoring, plus
//! best-effort geometric detectors for overhangs and thin walls.
//!
//! Detector output is never merged into a declared manifest implicitly; use
//! [`FeatureManifest::union`].

mod bvh;
mod overhang;
mod thin;

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh_io::MeshError;
use crate::primitives::AnalyticMeasures;

pub use overhang::{detect_overhangs, support_area_ratio, OverhangDetection, DEFAULT_OVERHANG_THRESHOLD_DEG};
pub use thin::{detect_thin_regions, ThinRegionOptions};

/// Current manifest schema version.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("unknown feature kind `{0}` (expected one of: {list})", list = FeatureKind::names().join(", "))]
    UnknownKind(String),
    #[error("feature `{label}` has non-positive or non-finite dimension {d}")]
    NonPositiveDimension { label: String, d: f64 },
    #[error("duplicate feature label `{0}`")]
    DuplicateLabel(String),
    #[error("feature `{label}` has significance override {value} outside (0, 1]")]
    SignificanceOutOfRange { label: String, value: f64 },
    #[error("feature `{label}`: {reason}")]
    AreaRatio { label: String, reason: String },
    #[error("manifest schema version {0} is newer than the supported version {MANIFEST_SCHEMA_VERSION}")]
    UnsupportedSchema(u32),
    #[error("invalid manifest JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("build direction must be a finite non-zero vector")]
    InvalidBuildDirection,
    #[error("overhang threshold {0}° must lie in (0°, 90°]")]
    InvalidThreshold(f64),
    #[error("thickness cap {0} mm must be positive")]
    InvalidThicknessCap(f64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Closed set of part characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FeatureKind {
    SupportedWall,
    UnsupportedWall,
    ThroughHole,
    Pin,
    Overhang,
    Bridge,
    EmbossedDetail,
    EngravedDetail,
    BooleanOverlap,
    AssemblyClearance,
    SupportRegion,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 11] = [
        FeatureKind::SupportedWall,
        FeatureKind::UnsupportedWall,
        FeatureKind::ThroughHole,
        FeatureKind::Pin,
        FeatureKind::Overhang,
        FeatureKind::Bridge,
        FeatureKind::EmbossedDetail,
        FeatureKind::EngravedDetail,
        FeatureKind::BooleanOverlap,
        FeatureKind::AssemblyClearance,
        FeatureKind::SupportRegion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::SupportedWall => "supported_wall",
            FeatureKind::UnsupportedWall => "unsupported_wall",
            FeatureKind::ThroughHole => "through_hole",
            FeatureKind::Pin => "pin",
            FeatureKind::Overhang => "overhang",
            FeatureKind::Bridge => "bridge",
            FeatureKind::EmbossedDetail => "embossed_detail",
            FeatureKind::EngravedDetail => "engraved_detail",
            FeatureKind::BooleanOverlap => "boolean_overlap",
            FeatureKind::AssemblyClearance => "assembly_clearance",
            FeatureKind::SupportRegion => "support_region",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|k| k.as_str()).collect()
    }

    /// Kinds whose dimension is an angle in degrees rather than a length.
    pub fn is_angular(self) -> bool {
        matches!(self, FeatureKind::Overhang | FeatureKind::SupportRegion)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| FeatureError::UnknownKind(s.to_owned()))
    }
}

impl TryFrom<String> for FeatureKind {
    type Error = FeatureError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<FeatureKind> for String {
    fn from(k: FeatureKind) -> Self {
        k.as_str().to_owned()
    }
}

/// One declared or detected characteristic with its governing dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureInstance {
    pub kind: FeatureKind,
    /// Millimetres, or degrees for angular kinds.
    pub d: f64,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significance_override: Option<f64>,
    /// Fraction of the surface needing support; `support_region` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_ratio: Option<f64>,
}

impl FeatureInstance {
    pub fn new(kind: FeatureKind, d: f64, label: impl Into<String>) -> Self {
        Self {
            kind,
            d,
            label: label.into(),
            significance_override: None,
            area_ratio: None,
        }
    }

    pub fn with_significance(mut self, s: f64) -> Self {
        self.significance_override = Some(s);
        self
    }

    pub fn with_area_ratio(mut self, ratio: f64) -> Self {
        self.area_ratio = Some(ratio);
        self
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(FeatureError::NonPositiveDimension {
                label: self.label.clone(),
                d: self.d,
            });
        }
        if let Some(s) = self.significance_override {
            if !(s > 0.0 && s <= 1.0) {
                return Err(FeatureError::SignificanceOutOfRange {
                    label: self.label.clone(),
                    value: s,
                });
            }
        }
        let area_error = |reason: &str| FeatureError::AreaRatio {
            label: self.label.clone(),
            reason: reason.to_owned(),
        };
        match (self.kind, self.area_ratio) {
            (FeatureKind::SupportRegion, None) => return Err(area_error("support_region requires area_ratio")),
            (FeatureKind::SupportRegion, Some(r)) if !(0.0..=1.0).contains(&r) => {
                return Err(area_error("area_ratio must lie in [0, 1]"))
            }
            (FeatureKind::SupportRegion, Some(_)) => {}
            (_, Some(_)) => return Err(area_error("area_ratio is only allowed on support_region")),
            (_, None) => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ManifestSource {
    #[default]
    Declared,
    Detected,
    Generated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    #[default]
    Mm,
    Cm,
}

/// Validated list of features, always held in millimetres.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureManifest {
    pub schema_version: u32,
    pub units: LengthUnit,
    pub source: ManifestSource,
    pub features: Vec<FeatureInstance>,
    /// Exact area and volume of the solid, written by the generators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticMeasures>,
}

impl Default for FeatureManifest {
    fn default() -> Self {
        Self::empty(ManifestSource::Declared)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default = "default_schema")]
    schema_version: u32,
    #[serde(default)]
    units: LengthUnit,
    #[serde(default)]
    source: ManifestSource,
    #[serde(default)]
    features: Vec<FeatureInstance>,
    #[serde(default)]
    analytic: Option<AnalyticMeasures>,
}

fn default_schema() -> u32 {
    MANIFEST_SCHEMA_VERSION
}

impl FeatureManifest {
    pub fn empty(source: ManifestSource) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            units: LengthUnit::Mm,
            source,
            features: Vec::new(),
            analytic: None,
        }
    }

    /// Validates and wraps a feature list given in millimetres.
    pub fn new(source: ManifestSource, features: Vec<FeatureInstance>) -> Result<Self, FeatureError> {
        let manifest = Self {
            features,
            ..Self::empty(source)
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.schema_version > MANIFEST_SCHEMA_VERSION {
            return Err(FeatureError::UnsupportedSchema(self.schema_version));
        }
        let mut labels = HashSet::new();
        for f in &self.features {
            f.validate()?;
            if !labels.insert(f.label.as_str()) {
                return Err(FeatureError::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(())
    }

    /// Parses and validates a manifest, converting centimetre lengths to
    /// millimetres. Angles are left untouched.
    pub fn from_json_str(text: &str) -> Result<Self, FeatureError> {
        let raw: RawManifest = serde_json::from_str(text)?;
        if raw.schema_version > MANIFEST_SCHEMA_VERSION {
            return Err(FeatureError::UnsupportedSchema(raw.schema_version));
        }
        let mut features = raw.features;
        let mut analytic = raw.analytic;
        if raw.units == LengthUnit::Cm {
            for f in features.iter_mut().filter(|f| !f.kind.is_angular()) {
                f.d *= 10.0;
            }
            if let Some(a) = analytic.as_mut() {
                a.area_mm2 *= 100.0;
                a.volume_mm3 *= 1000.0;
            }
        }
        let manifest = Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            units: LengthUnit::Mm,
            source: raw.source,
            features,
            analytic,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }

    /// Concatenates two manifests. Labels must stay unique; the source of
    /// `self` is kept.
    pub fn union(&self, other: &FeatureManifest) -> Result<Self, FeatureError> {
        let mut merged = self.clone();
        merged.features.extend(other.features.iter().cloned());
        if merged.analytic.is_none() {
            merged.analytic = other.analytic;
        }
        merged.validate()?;
        Ok(merged)
    }
}

pub fn load_manifest(path: &Path) -> Result<FeatureManifest, FeatureError> {
    let text = std::fs::read_to_string(path).map_err(|source| FeatureError::Io {
        path: path.display().to_string(),
        source,
    })?;
    FeatureManifest::from_json_str(&text)
}

pub fn save_manifest(manifest: &FeatureManifest, path: &Path) -> Result<(), FeatureError> {
    std::fs::write(path, manifest.to_json_string() + "\n").map_err(|source| FeatureError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A detector hit: the feature plus the triangles that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectedFeature {
    pub instance: FeatureInstance,
    pub area_mm2: f64,
    /// Indices into the input mesh, ascending.
    pub triangles: Vec<usize>,
}

/// Wraps detector output as a manifest with source `detected`.
pub fn detected_manifest(found: &[DetectedFeature]) -> Result<FeatureManifest, FeatureError> {
    FeatureManifest::new(
        ManifestSource::Detected,
        found.iter().map(|f| f.instance.clone()).collect(),
    )
}
