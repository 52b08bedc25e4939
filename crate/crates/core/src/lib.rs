//! Printability scoring for tessellated 3D models.
//!
//! The crate is organised the same way a model flows through it:
//!
//! - [`mesh_io`]: STL ingestion and export, vertex welding, topology
//!   diagnostics and the geometric integrals (area, signed volume, bounding box).
//! - [`primitives`]: deterministic generators for spheres, cylinders, tori,
//!   boxes and feature-ladder benchmark plates.
//! - [`metrics`]: mesh complexity, the area quality ratio, volume ratios and
//!   discrete mean curvature with histograms.
//! - [`features`]: part-characteristic manifests plus overhang, support-area
//!   and thin-region detectors.
//! - [`scoring`]: technology/application profiles and the probabilistic
//!   printability model.
//!
//! All lengths are millimetres unless a name says otherwise.
//!
//! ```
//! use printscore::primitives::{gen_primitive, PrimitiveSpec};
//! use printscore::metrics::quality_ratio;
//! use printscore::scoring::{printability, ApplicationProfile, ScoreOptions, TechnologyProfile};
//! use printscore::features::FeatureManifest;
//!
//! let sphere = gen_primitive(&PrimitiveSpec::icosphere(30.0, 4)).unwrap();
//! let qs = quality_ratio(&sphere.mesh, sphere.analytic.area_mm2).unwrap();
//! let fdm = TechnologyProfile::builtin("fdm").unwrap();
//! let app = ApplicationProfile::builtin("generic").unwrap();
//! let report = printability(qs.qs, &FeatureManifest::default(), &fdm, &app, &ScoreOptions::default()).unwrap();
//! assert!(report.score > 98.0 && report.score < 98.5);
//! ```

pub mod features;
pub mod mesh_io;
pub mod metrics;
pub mod primitives;
pub mod scoring;

mod numeric;

pub use mesh_io::{BoundingBox, TriangleMesh};
