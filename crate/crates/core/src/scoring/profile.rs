use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScoringError;
use crate::features::FeatureKind;

pub const PROFILE_SCHEMA_VERSION: u32 = 1;

/// Technology-wide traits that feed the global failure probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalCharacteristic {
    Accuracy,
    SurfaceTexture,
    Abnormalities,
    SupportConstruction,
}

impl GlobalCharacteristic {
    pub const ALL: [GlobalCharacteristic; 4] = [
        GlobalCharacteristic::Accuracy,
        GlobalCharacteristic::SurfaceTexture,
        GlobalCharacteristic::Abnormalities,
        GlobalCharacteristic::SupportConstruction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GlobalCharacteristic::Accuracy => "accuracy",
            GlobalCharacteristic::SurfaceTexture => "surface_texture",
            GlobalCharacteristic::Abnormalities => "abnormalities",
            GlobalCharacteristic::SupportConstruction => "support_construction",
        }
    }

    /// Support use does not depend on tessellation fidelity.
    pub fn is_support(self) -> bool {
        self == GlobalCharacteristic::SupportConstruction
    }
}

impl fmt::Display for GlobalCharacteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coarse quality grade; more stars means fewer defects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarRating {
    #[serde(rename = "one_star", alias = "*")]
    OneStar,
    #[serde(rename = "two_star", alias = "**")]
    TwoStar,
    #[serde(rename = "three_star", alias = "***")]
    ThreeStar,
}

impl StarRating {
    pub fn probability(self) -> f64 {
        match self {
            StarRating::OneStar => 0.05,
            StarRating::TwoStar => 0.03,
            StarRating::ThreeStar => 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdUnit {
    Mm,
    Deg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Threshold {
    pub value: f64,
    pub unit: ThresholdUnit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TechnologyFile {
    schema_version: u32,
    name: String,
    #[serde(default)]
    display_name: Option<String>,
    #[serde(default)]
    aliases: Vec<String>,
    #[serde(default)]
    stars: BTreeMap<GlobalCharacteristic, StarRating>,
    #[serde(default)]
    ds_perfect: BTreeMap<GlobalCharacteristic, f64>,
    #[serde(default)]
    thresholds: BTreeMap<FeatureKind, Threshold>,
    #[serde(default)]
    thresholds_origin: Option<String>,
    #[serde(default = "default_steepness")]
    angle_steepness_deg: f64,
    #[serde(default)]
    accuracy_note: String,
}

fn default_steepness() -> f64 {
    5.0
}

/// Per-technology defect priors and feature thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TechnologyProfile {
    pub name: String,
    pub display_name: String,
    pub aliases: Vec<String>,
    /// Defect probability of each global trait at perfect tessellation.
    pub ds_perfect: BTreeMap<GlobalCharacteristic, f64>,
    /// Dimension with an even chance of a flaw: mm, or degrees for angular kinds.
    pub thresholds: BTreeMap<FeatureKind, f64>,
    pub thresholds_origin: Option<String>,
    /// Degrees per logistic unit for angular kinds.
    pub angle_steepness_deg: f64,
    pub accuracy_note: String,
}

const BUILTIN_TECHNOLOGIES: [&str; 3] = [
    include_str!("../../profiles/fdm.json"),
    include_str!("../../profiles/binder_jetting.json"),
    include_str!("../../profiles/material_jetting.json"),
];

const BUILTIN_APPLICATIONS: [&str; 2] = [
    include_str!("../../profiles/generic.json"),
    include_str!("../../profiles/artistic.json"),
];

fn read_file(path: &Path) -> Result<String, ScoringError> {
    std::fs::read_to_string(path).map_err(|source| ScoringError::Io {
        path: path.display().to_string(),
        reason: source.to_string(),
    })
}

fn check_schema(found: u32) -> Result<(), ScoringError> {
    if found != PROFILE_SCHEMA_VERSION {
        return Err(ScoringError::UnsupportedSchema {
            found,
            supported: PROFILE_SCHEMA_VERSION,
        });
    }
    Ok(())
}

fn check_probability(profile: &str, field: String, value: f64) -> Result<(), ScoringError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(ScoringError::OutOfRange {
            profile: profile.to_owned(),
            field,
            value,
        });
    }
    Ok(())
}

impl TechnologyProfile {
    pub fn from_json_str(text: &str) -> Result<Self, ScoringError> {
        let raw: TechnologyFile = serde_json::from_str(text).map_err(|e| ScoringError::Json(e.to_string()))?;
        check_schema(raw.schema_version)?;
        // explicit probabilities refine the star grades
        let mut ds_perfect: BTreeMap<_, _> = raw.stars.iter().map(|(&x, s)| (x, s.probability())).collect();
        ds_perfect.extend(raw.ds_perfect);
        let mut thresholds = BTreeMap::new();
        for (kind, t) in raw.thresholds {
            let expected = if kind.is_angular() { ThresholdUnit::Deg } else { ThresholdUnit::Mm };
            if t.unit != expected {
                return Err(ScoringError::ThresholdUnit {
                    profile: raw.name.clone(),
                    kind,
                    expected,
                    found: t.unit,
                });
            }
            thresholds.insert(kind, t.value);
        }
        let profile = Self {
            display_name: raw.display_name.unwrap_or_else(|| raw.name.clone()),
            name: raw.name,
            aliases: raw.aliases,
            ds_perfect,
            thresholds,
            thresholds_origin: raw.thresholds_origin,
            angle_steepness_deg: raw.angle_steepness_deg,
            accuracy_note: raw.accuracy_note,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: &Path) -> Result<Self, ScoringError> {
        Self::from_json_str(&read_file(path)?)
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        for x in GlobalCharacteristic::ALL {
            let p = *self.ds_perfect.get(&x).ok_or_else(|| ScoringError::MissingCharacteristic {
                profile: self.name.clone(),
                characteristic: x,
            })?;
            check_probability(&self.name, format!("ds_perfect.{x}"), p)?;
        }
        for (&kind, &w) in &self.thresholds {
            // angles may sit at zero: some processes need no support at any angle
            let ok = w.is_finite() && if kind.is_angular() { (0.0..=90.0).contains(&w) } else { w > 0.0 };
            if !ok {
                return Err(ScoringError::InvalidThreshold {
                    profile: self.name.clone(),
                    kind,
                    value: w,
                });
            }
        }
        if !(self.angle_steepness_deg > 0.0 && self.angle_steepness_deg.is_finite()) {
            return Err(ScoringError::InvalidOption(format!(
                "angle steepness must be positive, got {}",
                self.angle_steepness_deg
            )));
        }
        Ok(())
    }

    pub fn builtins() -> Vec<Self> {
        BUILTIN_TECHNOLOGIES
            .iter()
            .map(|text| Self::from_json_str(text).expect("built-in technology profile"))
            .collect()
    }

    pub fn builtin_names() -> Vec<String> {
        Self::builtins().into_iter().map(|p| p.name).collect()
    }

    /// Looks up a built-in by name or alias, ignoring case and `-`/`_`.
    pub fn builtin(name: &str) -> Result<Self, ScoringError> {
        let wanted = normalize(name);
        Self::builtins()
            .into_iter()
            .find(|p| normalize(&p.name) == wanted || p.aliases.iter().any(|a| normalize(a) == wanted))
            .ok_or_else(|| ScoringError::UnknownTechnology {
                name: name.to_owned(),
                available: Self::builtin_names(),
            })
    }
}

fn normalize(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace('-', "_")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplicationFile {
    schema_version: u32,
    name: String,
    k: BTreeMap<GlobalCharacteristic, f64>,
    #[serde(default)]
    s: BTreeMap<FeatureKind, f64>,
}

/// How strongly an application cares about each global trait and feature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApplicationProfile {
    pub name: String,
    /// Sensitivity to each global trait, in [0, 1].
    pub k: BTreeMap<GlobalCharacteristic, f64>,
    /// Impact of a flawed feature on the whole part, in (0, 1].
    pub s: BTreeMap<FeatureKind, f64>,
}

impl ApplicationProfile {
    pub fn from_json_str(text: &str) -> Result<Self, ScoringError> {
        let raw: ApplicationFile = serde_json::from_str(text).map_err(|e| ScoringError::Json(e.to_string()))?;
        check_schema(raw.schema_version)?;
        let profile = Self {
            name: raw.name,
            k: raw.k,
            s: raw.s,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: &Path) -> Result<Self, ScoringError> {
        Self::from_json_str(&read_file(path)?)
    }

    /// Same sensitivity for every global trait.
    pub fn with_uniform_k(mut self, k: f64) -> Self {
        for x in GlobalCharacteristic::ALL {
            self.k.insert(x, k);
        }
        self
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        for x in GlobalCharacteristic::ALL {
            let k = *self.k.get(&x).ok_or_else(|| ScoringError::MissingCharacteristic {
                profile: self.name.clone(),
                characteristic: x,
            })?;
            check_probability(&self.name, format!("k.{x}"), k)?;
        }
        for (kind, &s) in &self.s {
            if !(s > 0.0 && s <= 1.0) {
                return Err(ScoringError::OutOfRange {
                    profile: self.name.clone(),
                    field: format!("s.{kind}"),
                    value: s,
                });
            }
        }
        Ok(())
    }

    pub fn builtins() -> Vec<Self> {
        BUILTIN_APPLICATIONS
            .iter()
            .map(|text| Self::from_json_str(text).expect("built-in application profile"))
            .collect()
    }

    pub fn builtin_names() -> Vec<String> {
        Self::builtins().into_iter().map(|p| p.name).collect()
    }

    pub fn builtin(name: &str) -> Result<Self, ScoringError> {
        let wanted = normalize(name);
        Self::builtins()
            .into_iter()
            .find(|p| normalize(&p.name) == wanted)
            .ok_or_else(|| ScoringError::UnknownApplication {
                name: name.to_owned(),
                available: Self::builtin_names(),
            })
    }
}
