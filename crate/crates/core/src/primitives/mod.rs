//! Deterministic test solids and feature-ladder benchmark plates.
//!
//! Every generator places vertices on the analytic surface, so measured area
//! and volume approach the analytic values from below as resolution grows.
//! The analytic values are returned alongside the mesh to serve as the
//! reference area for the quality ratio.

mod benchmark;
mod builder;
mod solids;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureManifest, ManifestSource};
use crate::mesh_io::TriangleMesh;

pub use benchmark::{gen_benchmark, BenchmarkSpec, GeneratedBenchmark};

/// Default cap on generated triangle counts.
pub const DEFAULT_MAX_TRIANGLES: u64 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveDimension { name: &'static str, value: f64 },
    #[error("resolution {resolution} is below the minimum {minimum} for this primitive")]
    ResolutionTooLow { resolution: u32, minimum: u32 },
    #[error("resolution would produce {requested} triangles, above the cap of {cap}")]
    TooManyTriangles { requested: u128, cap: u64 },
    #[error("torus minor radius {minor} must be smaller than the major radius {major}")]
    SelfIntersectingTorus { major: f64, minor: f64 },
    #[error("{ladder} ladder must be strictly increasing")]
    LadderNotIncreasing { ladder: &'static str },
    #[error("{ladder} ladder value {value} is out of range")]
    LadderValueOutOfRange { ladder: &'static str, value: f64 },
    #[error("features need {required:.3} mm of plate length but the plate is {available:.3} mm")]
    PlateTooShort { required: f64, available: f64 },
    #[error("feature `{label}` needs {required:.3} mm of plate depth but the plate is {available:.3} mm")]
    PlateTooNarrow {
        label: String,
        required: f64,
        available: f64,
    },
}

/// How a sphere is tessellated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SphereTessellation {
    /// Geodesic subdivision of an icosahedron; resolution is the subdivision
    /// level and the mesh has `20·4^level` triangles.
    #[default]
    Icosphere,
    /// Latitude/longitude grid with `stacks = resolution` and
    /// `slices = 2·stacks`, giving `4·s·(s−1)` triangles. Stacks 7, 20, 61
    /// and 193 give 168, 1520, 14640 and 148224 triangles.
    Uv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimitiveKind {
    Sphere {
        diameter: f64,
        #[serde(default)]
        tessellation: SphereTessellation,
    },
    /// Axis along z. Resolution `r` uses `4·2^r` segments around the axis.
    Cylinder { diameter: f64, height: f64 },
    /// Around the z axis. Resolution `r` uses `4·2^r` segments around the
    /// axis and a proportional count around the tube.
    Torus { major_radius: f64, minor_radius: f64 },
    /// Each face is split into an `r × r` grid.
    Box { extents: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveSpec {
    pub kind: PrimitiveKind,
    pub resolution: u32,
    #[serde(default = "default_cap")]
    pub max_triangles: u64,
}

fn default_cap() -> u64 {
    DEFAULT_MAX_TRIANGLES
}

impl PrimitiveSpec {
    pub fn new(kind: PrimitiveKind, resolution: u32) -> Self {
        Self {
            kind,
            resolution,
            max_triangles: DEFAULT_MAX_TRIANGLES,
        }
    }

    pub fn icosphere(diameter: f64, level: u32) -> Self {
        Self::new(
            PrimitiveKind::Sphere {
                diameter,
                tessellation: SphereTessellation::Icosphere,
            },
            level,
        )
    }

    pub fn uv_sphere(diameter: f64, stacks: u32) -> Self {
        Self::new(
            PrimitiveKind::Sphere {
                diameter,
                tessellation: SphereTessellation::Uv,
            },
            stacks,
        )
    }

    pub fn cylinder(diameter: f64, height: f64, resolution: u32) -> Self {
        Self::new(PrimitiveKind::Cylinder { diameter, height }, resolution)
    }

    pub fn torus(major_radius: f64, minor_radius: f64, resolution: u32) -> Self {
        Self::new(
            PrimitiveKind::Torus {
                major_radius,
                minor_radius,
            },
            resolution,
        )
    }

    pub fn cuboid(extents: [f64; 3], resolution: u32) -> Self {
        Self::new(PrimitiveKind::Box { extents }, resolution)
    }

    /// Triangle count the spec will produce.
    pub fn triangle_count(&self) -> u128 {
        let r = self.resolution as u128;
        match self.kind {
            PrimitiveKind::Sphere {
                tessellation: SphereTessellation::Icosphere,
                ..
            } => 20u128.saturating_mul(4u128.saturating_pow(self.resolution)),
            PrimitiveKind::Sphere {
                tessellation: SphereTessellation::Uv,
                ..
            } => 4 * r * r.saturating_sub(1),
            PrimitiveKind::Cylinder { diameter, height } => {
                let n = solids::segments(self.resolution) as u128;
                let rings = solids::cylinder_rings(diameter / 2.0, height, n as usize) as u128;
                2 * n * (rings + 1)
            }
            PrimitiveKind::Torus {
                major_radius,
                minor_radius,
            } => {
                let n = solids::segments(self.resolution) as u128;
                let m = solids::tube_segments(n as usize, major_radius, minor_radius) as u128;
                2 * n * m
            }
            PrimitiveKind::Box { .. } => 12 * r * r,
        }
    }

    fn validate(&self) -> Result<(), GenerateError> {
        let positive = |name: &'static str, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(GenerateError::NonPositiveDimension { name, value })
            }
        };
        let minimum = match self.kind {
            PrimitiveKind::Sphere {
                diameter,
                tessellation,
            } => {
                positive("diameter", diameter)?;
                match tessellation {
                    SphereTessellation::Icosphere => 1,
                    SphereTessellation::Uv => 2,
                }
            }
            PrimitiveKind::Cylinder { diameter, height } => {
                positive("diameter", diameter)?;
                positive("height", height)?;
                1
            }
            PrimitiveKind::Torus {
                major_radius,
                minor_radius,
            } => {
                positive("major radius", major_radius)?;
                positive("minor radius", minor_radius)?;
                if minor_radius >= major_radius {
                    return Err(GenerateError::SelfIntersectingTorus {
                        major: major_radius,
                        minor: minor_radius,
                    });
                }
                1
            }
            PrimitiveKind::Box { extents } => {
                for (name, e) in ["x extent", "y extent", "z extent"].into_iter().zip(extents) {
                    positive(name, e)?;
                }
                1
            }
        };
        if self.resolution < minimum {
            return Err(GenerateError::ResolutionTooLow {
                resolution: self.resolution,
                minimum,
            });
        }
        // Segment counts double per level; stop before the shift overflows.
        let requested = if self.resolution > 40 && !matches!(
            self.kind,
            PrimitiveKind::Sphere {
                tessellation: SphereTessellation::Uv,
                ..
            } | PrimitiveKind::Box { .. }
        ) {
            u128::MAX
        } else {
            self.triangle_count()
        };
        if requested > self.max_triangles as u128 {
            return Err(GenerateError::TooManyTriangles {
                requested,
                cap: self.max_triangles,
            });
        }
        Ok(())
    }

    /// Exact surface area and volume of the solid the mesh approximates.
    pub fn analytic(&self) -> AnalyticMeasures {
        match self.kind {
            PrimitiveKind::Sphere { diameter, .. } => {
                let r = diameter / 2.0;
                AnalyticMeasures {
                    area_mm2: 4.0 * PI * r * r,
                    volume_mm3: 4.0 / 3.0 * PI * r * r * r,
                }
            }
            PrimitiveKind::Cylinder { diameter, height } => {
                let r = diameter / 2.0;
                AnalyticMeasures {
                    area_mm2: 2.0 * PI * r * (r + height),
                    volume_mm3: PI * r * r * height,
                }
            }
            PrimitiveKind::Torus {
                major_radius,
                minor_radius,
            } => AnalyticMeasures {
                area_mm2: 4.0 * PI * PI * major_radius * minor_radius,
                volume_mm3: 2.0 * PI * PI * major_radius * minor_radius * minor_radius,
            },
            PrimitiveKind::Box { extents: [a, b, c] } => AnalyticMeasures {
                area_mm2: 2.0 * (a * b + b * c + c * a),
                volume_mm3: a * b * c,
            },
        }
    }
}

/// Surface area and volume of the ideal solid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMeasures {
    pub area_mm2: f64,
    pub volume_mm3: f64,
}

#[derive(Debug, Clone)]
pub struct GeneratedPrimitive {
    pub mesh: TriangleMesh,
    /// Always empty: plain solids carry no part characteristics.
    pub manifest: FeatureManifest,
    pub analytic: AnalyticMeasures,
}

/// Builds a watertight, outward-oriented mesh centred on the origin.
pub fn gen_primitive(spec: &PrimitiveSpec) -> Result<GeneratedPrimitive, GenerateError> {
    spec.validate()?;
    let mesh = match spec.kind {
        PrimitiveKind::Sphere {
            diameter,
            tessellation: SphereTessellation::Icosphere,
        } => solids::icosphere(diameter / 2.0, spec.resolution).with_name("sphere"),
        PrimitiveKind::Sphere {
            diameter,
            tessellation: SphereTessellation::Uv,
        } => solids::uv_sphere(diameter / 2.0, spec.resolution as usize).with_name("sphere"),
        PrimitiveKind::Cylinder { diameter, height } => {
            solids::cylinder(diameter / 2.0, height, solids::segments(spec.resolution)).with_name("cylinder")
        }
        PrimitiveKind::Torus {
            major_radius,
            minor_radius,
        } => solids::torus(major_radius, minor_radius, solids::segments(spec.resolution)).with_name("torus"),
        PrimitiveKind::Box { extents } => solids::cuboid(extents, spec.resolution as usize).with_name("box"),
    };
    debug_assert_eq!(mesh.triangle_count() as u128, spec.triangle_count());
    Ok(GeneratedPrimitive {
        mesh,
        manifest: FeatureManifest::empty(ManifestSource::Generated),
        analytic: spec.analytic(),
    })
}
