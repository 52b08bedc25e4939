//! Probabilistic printability model.
//!
//! A model's chance of printing cleanly is the chance that no global
//! technology trait spoils it times, for every declared feature, the chance
//! that feature comes out without a flaw. The score is that probability in
//! percent.

mod profile;

use serde::Serialize;
use thiserror::Error;

use crate::features::{FeatureError, FeatureInstance, FeatureKind, FeatureManifest};
use crate::metrics::ResolvedReference;

pub use profile::{
    ApplicationProfile, GlobalCharacteristic, StarRating, TechnologyProfile, Threshold, ThresholdUnit,
    PROFILE_SCHEMA_VERSION,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("quality ratio must be positive and finite, got {0}")]
    NonPositiveQs(f64),
    #[error("probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("profile '{profile}' has no value for '{characteristic}'")]
    MissingCharacteristic {
        profile: String,
        characteristic: GlobalCharacteristic,
    },
    #[error("technology '{technology}' has no threshold for '{kind}'")]
    MissingThreshold { technology: String, kind: FeatureKind },
    #[error("application '{application}' has no significance for '{kind}' and feature '{label}' sets none")]
    MissingSignificance {
        application: String,
        kind: FeatureKind,
        label: String,
    },
    #[error("profile '{profile}': {field} = {value} is out of range")]
    OutOfRange { profile: String, field: String, value: f64 },
    #[error("profile '{profile}': threshold for '{kind}' must be given in {expected:?}, found {found:?}")]
    ThresholdUnit {
        profile: String,
        kind: FeatureKind,
        expected: ThresholdUnit,
        found: ThresholdUnit,
    },
    #[error("profile '{profile}': invalid threshold {value} for '{kind}'")]
    InvalidThreshold { profile: String, kind: FeatureKind, value: f64 },
    #[error("unknown technology '{name}'; available: {}", available.join(", "))]
    UnknownTechnology { name: String, available: Vec<String> },
    #[error("unknown application '{name}'; available: {}", available.join(", "))]
    UnknownApplication { name: String, available: Vec<String> },
    #[error("unsupported profile schema version {found} (supported: {supported})")]
    UnsupportedSchema { found: u32, supported: u32 },
    #[error("invalid profile JSON: {0}")]
    Json(String),
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("no technologies to compare")]
    NoTechnologies,
    #[error("{0}")]
    InvalidOption(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

/// `1/(1+e^{-x})` without overflow for large |x|.
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Defect probability of one global trait given the tessellation quality.
/// Support construction ignores `qs`.
pub fn defect_score(ds_perfect: f64, qs: f64, is_support: bool) -> Result<f64, ScoringError> {
    if !(0.0..=1.0).contains(&ds_perfect) {
        return Err(ScoringError::ProbabilityOutOfRange(ds_perfect));
    }
    let qs = effective_qs(qs)?.0;
    let q = if is_support { 1.0 } else { qs };
    Ok(1.0 - (1.0 - ds_perfect) * q)
}

/// Clamps `qs` into (0, 1]; the flag says whether clamping happened.
fn effective_qs(qs: f64) -> Result<(f64, bool), ScoringError> {
    if !(qs > 0.0 && qs.is_finite()) {
        return Err(ScoringError::NonPositiveQs(qs));
    }
    Ok(if qs > 1.0 { (1.0, true) } else { (qs, false) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectTerm {
    pub characteristic: GlobalCharacteristic,
    pub ds_perfect: f64,
    pub ds: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalProbability {
    pub terms: Vec<DefectTerm>,
    pub p_failure: f64,
    pub p_success: f64,
}

pub fn global_probability(
    tech: &TechnologyProfile,
    app: &ApplicationProfile,
    qs: f64,
) -> Result<GlobalProbability, ScoringError> {
    let mut terms = Vec::with_capacity(4);
    let mut p_success = 1.0;
    for x in GlobalCharacteristic::ALL {
        let missing = |profile: &str| ScoringError::MissingCharacteristic {
            profile: profile.to_owned(),
            characteristic: x,
        };
        let ds_perfect = *tech.ds_perfect.get(&x).ok_or_else(|| missing(&tech.name))?;
        let k = *app.k.get(&x).ok_or_else(|| missing(&app.name))?;
        let ds = defect_score(ds_perfect, qs, x.is_support())?;
        p_success *= 1.0 - ds * k;
        terms.push(DefectTerm {
            characteristic: x,
            ds_perfect,
            ds,
            k,
        });
    }
    Ok(GlobalProbability {
        terms,
        p_failure: 1.0 - p_success,
        p_success,
    })
}

/// One feature's contribution, with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureTerm {
    pub label: String,
    pub kind: FeatureKind,
    pub d: f64,
    pub w: f64,
    pub s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area_ratio: Option<f64>,
    /// Degrees per logistic unit; angular kinds only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steepness_deg: Option<f64>,
    pub p_flaw: f64,
}

/// Logistic flaw probability of a single feature.
///
/// `steepness_deg` overrides the technology's angular scale when given.
pub fn pcp(
    feature: &FeatureInstance,
    tech: &TechnologyProfile,
    app: &ApplicationProfile,
    steepness_deg: Option<f64>,
) -> Result<FeatureTerm, ScoringError> {
    let w = *tech.thresholds.get(&feature.kind).ok_or_else(|| ScoringError::MissingThreshold {
        technology: tech.name.clone(),
        kind: feature.kind,
    })?;
    let s = match feature.significance_override {
        Some(s) => s,
        None => *app.s.get(&feature.kind).ok_or_else(|| ScoringError::MissingSignificance {
            application: app.name.clone(),
            kind: feature.kind,
            label: feature.label.clone(),
        })?,
    };
    let steepness = feature
        .kind
        .is_angular()
        .then(|| steepness_deg.unwrap_or(tech.angle_steepness_deg));
    let x = (w - feature.d) / steepness.unwrap_or(1.0);
    let mut p_flaw = logistic(x) * s;
    let area_ratio = if feature.kind == FeatureKind::SupportRegion {
        let r = feature.area_ratio.unwrap_or(1.0);
        p_flaw *= r;
        Some(r)
    } else {
        None
    };
    Ok(FeatureTerm {
        label: feature.label.clone(),
        kind: feature.kind,
        d: feature.d,
        w,
        s,
        area_ratio,
        steepness_deg: steepness,
        p_flaw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Printable,
    Risky,
    Unprintable,
}

/// Score cut-offs: `printable` and above is printable, below `unprintable`
/// is unprintable, anything between is risky.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationThresholds {
    pub printable: f64,
    pub unprintable: f64,
}

impl Default for ClassificationThresholds {
    fn default() -> Self {
        Self {
            printable: 80.0,
            unprintable: 30.0,
        }
    }
}

impl ClassificationThresholds {
    pub fn new(printable: f64, unprintable: f64) -> Result<Self, ScoringError> {
        if !(0.0 <= unprintable && unprintable <= printable && printable <= 100.0) {
            return Err(ScoringError::InvalidOption(format!(
                "classification thresholds need 0 <= unprintable <= printable <= 100, got {printable}/{unprintable}"
            )));
        }
        Ok(Self { printable, unprintable })
    }

    pub fn classify(&self, score: f64) -> Classification {
        if score >= self.printable {
            Classification::Printable
        } else if score >= self.unprintable {
            Classification::Risky
        } else {
            Classification::Unprintable
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreOptions {
    /// Replaces every sensitivity of the application profile.
    pub k_override: Option<f64>,
    pub classification: ClassificationThresholds,
    /// Replaces the technology's angular steepness.
    pub steepness_deg: Option<f64>,
}

impl ScoreOptions {
    pub fn validate(&self) -> Result<(), ScoringError> {
        if let Some(k) = self.k_override {
            if !(0.0..=1.0).contains(&k) {
                return Err(ScoringError::InvalidOption(format!("k must lie in [0, 1], got {k}")));
            }
        }
        if let Some(s) = self.steepness_deg {
            if !(s > 0.0 && s.is_finite()) {
                return Err(ScoringError::InvalidOption(format!("steepness must be positive, got {s}")));
            }
        }
        ClassificationThresholds::new(self.classification.printable, self.classification.unprintable)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub technology: String,
    pub application: String,
    pub k_override: Option<f64>,
    pub steepness_deg: Option<f64>,
    pub classification: ClassificationThresholds,
    /// Where the reference area behind `qs` came from, when known.
    pub reference: Option<ResolvedReference>,
    pub thresholds_origin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintabilityReport {
    pub schema_version: u32,
    pub technology: String,
    /// As supplied, before clamping.
    pub qs_input: f64,
    pub qs: f64,
    pub defect_scores: Vec<DefectTerm>,
    pub p_global_failure: f64,
    pub p_global_success: f64,
    pub features: Vec<FeatureTerm>,
    pub p_success: f64,
    pub score: f64,
    pub classification: Classification,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

impl PrintabilityReport {
    pub fn with_reference(mut self, reference: Option<ResolvedReference>) -> Self {
        self.provenance.reference = reference;
        self
    }
}

pub fn printability(
    qs: f64,
    manifest: &FeatureManifest,
    tech: &TechnologyProfile,
    app: &ApplicationProfile,
    options: &ScoreOptions,
) -> Result<PrintabilityReport, ScoringError> {
    options.validate()?;
    manifest.validate()?;
    let (qs_eff, clamped) = effective_qs(qs)?;
    let mut warnings = Vec::new();
    if clamped {
        let msg = format!("quality ratio {qs} exceeds 1; using 1");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let overridden;
    let app = match options.k_override {
        Some(k) => {
            overridden = app.clone().with_uniform_k(k);
            &overridden
        }
        None => app,
    };
    let global = global_probability(tech, app, qs_eff)?;
    let features = manifest
        .features
        .iter()
        .map(|f| pcp(f, tech, app, options.steepness_deg))
        .collect::<Result<Vec<_>, _>>()?;
    let p_success = features.iter().fold(global.p_success, |p, t| p * (1.0 - t.p_flaw));
    let score = 100.0 * p_success;
    Ok(PrintabilityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        technology: tech.name.clone(),
        qs_input: qs,
        qs: qs_eff,
        defect_scores: global.terms,
        p_global_failure: global.p_failure,
        p_global_success: global.p_success,
        features,
        p_success,
        score,
        classification: options.classification.classify(score),
        warnings,
        provenance: Provenance {
            technology: tech.name.clone(),
            application: app.name.clone(),
            k_override: options.k_override,
            steepness_deg: options.steepness_deg,
            classification: options.classification,
            reference: None,
            thresholds_origin: tech.thresholds_origin.clone(),
        },
    })
}

/// Tessellation quality for a comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum QualityInput {
    Shared(f64),
    /// One value per technology, in the same order.
    PerTechnology(Vec<f64>),
}

/// Scores the model on each technology; best first, ties by technology name.
pub fn compare(
    qs: &QualityInput,
    manifest: &FeatureManifest,
    technologies: &[TechnologyProfile],
    app: &ApplicationProfile,
    options: &ScoreOptions,
) -> Result<Vec<PrintabilityReport>, ScoringError> {
    if technologies.is_empty() {
        return Err(ScoringError::NoTechnologies);
    }
    if let QualityInput::PerTechnology(v) = qs {
        if v.len() != technologies.len() {
            return Err(ScoringError::InvalidOption(format!(
                "{} quality ratios given for {} technologies",
                v.len(),
                technologies.len()
            )));
        }
    }
    let mut reports = technologies
        .iter()
        .enumerate()
        .map(|(i, tech)| {
            let q = match qs {
                QualityInput::Shared(q) => *q,
                QualityInput::PerTechnology(v) => v[i],
            };
            printability(q, manifest, tech, app, options)
        })
        .collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.technology.cmp(&b.technology)));
    Ok(reports)
}
