//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.
//!
//! Run with `cargo test -p printscore --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use printscore::features::{detect_overhangs, FeatureManifest};
use printscore::mesh_io::{
    bounding_box, parse_stl, signed_volume, surface_area, write_stl, StlError, StlFormat, VolumePolicy,
};
use printscore::metrics::{curvature_histogram, mean_curvature, quality_ratio, volume_ratio, DEFAULT_BINS};
use printscore::primitives::{gen_benchmark, gen_primitive, BenchmarkSpec, PrimitiveSpec};
use printscore::scoring::{
    global_probability, pcp, printability, ApplicationProfile, ScoreOptions, TechnologyProfile,
};
use printscore::TriangleMesh;

use printscore::features::{FeatureInstance, FeatureKind};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPHERE_DIAMETER: f64 = 30.0;
/// UV stack counts whose meshes have 168, 1520, 14640 and 148224 faces.
const UV_STACKS: [u32; 4] = [7, 20, 61, 193];
const TECHS: [&str; 3] = ["fdm", "binder_jetting", "material_jetting"];

type Outcome = Result<String, String>;

fn sphere_area() -> f64 {
    PI * SPHERE_DIAMETER * SPHERE_DIAMETER
}

fn tech(name: &str) -> TechnologyProfile {
    TechnologyProfile::builtin(name).unwrap()
}

fn generic() -> ApplicationProfile {
    ApplicationProfile::builtin("generic").unwrap()
}

fn within_time(start: Instant, budget: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took > budget {
        Err(format!("{detail}; took {took:?}, budget {budget:?}"))
    } else {
        Ok(format!("{detail} ({took:.2?})"))
    }
}

fn global_arithmetic() -> Outcome {
    let app = generic().with_uniform_k(0.1);
    let fdm = tech("fdm");
    let start = Instant::now();
    let got = global_probability(&fdm, &app, 1.0).map_err(|e| e.to_string())?.p_success;
    let took = start.elapsed();
    // single-expression oracle over the priors (accuracy, texture, abnormalities, support)
    let ds = |p: f64, q: f64| 1.0 - (1.0 - p) * q;
    let oracle = (1.0 - ds(0.03, 1.0) * 0.1)
        * (1.0 - ds(0.05, 1.0) * 0.1)
        * (1.0 - ds(0.05, 1.0) * 0.1)
        * (1.0 - ds(0.03, 1.0) * 0.1);
    let literal = 0.997 * 0.995 * 0.995 * 0.997;
    if (got - oracle).abs() > 1e-9 || (got - literal).abs() > 1e-9 || (got - 0.984094).abs() > 1e-6 {
        return Err(format!("1-P_G = {got}, oracle {oracle}"));
    }
    if took > Duration::from_millis(1) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("1-P_G = {got:.10} ({took:?})"))
}

fn global_table() -> Outcome {
    let start = Instant::now();
    // rows: faces, then 1-P_G for fdm/binder/material at k=0.1 and at k=0.5
    let table: [(usize, [f64; 3], [f64; 3]); 4] = [
        (168, [0.97239246, 0.978116384, 0.981823174], [0.867419752, 0.89389853, 0.911550807]),
        (1520, [0.982638713, 0.988553692, 0.992496154], [0.915394871, 0.943702897, 0.962885818]),
        (14640, [0.983937057, 0.989876312, 0.993848738], [0.921572972, 0.950117484, 0.969498937]),
        (148224, [0.984078112, 0.990020005, 0.993995687], [0.922245513, 0.950815781, 0.970218865]),
    ];
    let mut worst: f64 = 0.0;
    for (stacks, (faces, low, high)) in UV_STACKS.iter().zip(table) {
        let g = gen_primitive(&PrimitiveSpec::uv_sphere(SPHERE_DIAMETER, *stacks)).map_err(|e| e.to_string())?;
        if g.mesh.triangle_count() != faces {
            return Err(format!("stacks {stacks} gave {} faces, wanted {faces}", g.mesh.triangle_count()));
        }
        let qs = quality_ratio(&g.mesh, sphere_area()).map_err(|e| e.to_string())?.qs;
        for (k, row) in [(0.1, low), (0.5, high)] {
            let app = generic().with_uniform_k(k);
            for (name, expected) in TECHS.iter().zip(row) {
                let got = global_probability(&tech(name), &app, qs).map_err(|e| e.to_string())?.p_success;
                let err = (got - expected).abs();
                worst = worst.max(err);
                if err > 2e-3 {
                    return Err(format!("{faces} faces, {name}, k={k}: {got} vs {expected}"));
                }
            }
        }
    }
    within_time(start, Duration::from_secs(5), format!("24 cells, worst |err| = {worst:.2e}"))
}

fn primitive_scores() -> Outcome {
    let start = Instant::now();
    let table = [
        ("sphere", PrimitiveSpec::uv_sphere(SPHERE_DIAMETER, 61), [98.379, 98.973, 99.370]),
        ("cylinder", PrimitiveSpec::cylinder(30.0, 30.0, 4), [98.406, 99.000, 99.397]),
        ("torus", PrimitiveSpec::torus(10.0, 4.0, 4), [98.409, 99.004, 99.401]),
        ("box", PrimitiveSpec::cuboid([30.0, 30.0, 30.0], 4), [98.406, 99.001, 99.398]),
    ];
    let app = generic().with_uniform_k(0.1);
    let mut worst: f64 = 0.0;
    for (label, spec, expected) in table {
        let g = gen_primitive(&spec).map_err(|e| e.to_string())?;
        let qs = quality_ratio(&g.mesh, g.analytic.area_mm2).map_err(|e| e.to_string())?.qs;
        let scores: Vec<f64> = TECHS
            .iter()
            .map(|name| {
                printability(qs, &FeatureManifest::default(), &tech(name), &app, &ScoreOptions::default())
                    .map(|r| r.score)
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        for ((name, got), want) in TECHS.iter().zip(&scores).zip(expected) {
            worst = worst.max((got - want).abs());
            if (got - want).abs() > 0.15 {
                return Err(format!("{label} on {name}: {got:.3} vs {want}"));
            }
        }
        if !(scores[2] > scores[1] && scores[1] > scores[0]) {
            return Err(format!("{label}: ordering broken {scores:?}"));
        }
    }
    within_time(start, Duration::from_secs(5), format!("worst |err| = {worst:.3} pp"))
}

fn sphere_convergence() -> Outcome {
    let start = Instant::now();
    let mut last = 0.0;
    let mut detail = Vec::new();
    for stacks in UV_STACKS {
        let g = gen_primitive(&PrimitiveSpec::uv_sphere(SPHERE_DIAMETER, stacks)).map_err(|e| e.to_string())?;
        let faces = g.mesh.triangle_count();
        let v = signed_volume(&g.mesh, VolumePolicy::RequireWatertight).map_err(|e| e.to_string())?.m3();
        if v <= last {
            return Err(format!("volume not increasing at {faces} faces"));
        }
        last = v;
        if faces >= 100_000 && (v - 1.414e-5).abs() / 1.414e-5 > 0.005 {
            return Err(format!("{faces} faces: volume {v:e} m³"));
        }
        let bbox = bounding_box(&g.mesh).map_err(|e| e.to_string())?;
        if faces >= 1520 && bbox.extents().iter().any(|e| (e - 30.0).abs() > 0.05) {
            return Err(format!("{faces} faces: bbox {:?}", bbox.extents()));
        }
        detail.push(format!("{faces}:{:.3}", v * 1e5));
    }
    within_time(start, Duration::from_secs(10), format!("volumes (1e-5 m³) {}", detail.join(" ")))
}

fn logistic_midpoint() -> Outcome {
    let app = generic();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..1000 {
        let w: f64 = rng.gen_range(0.05..20.0);
        let d: f64 = rng.gen_range(0.05..20.0);
        let s: f64 = rng.gen_range(0.01..=1.0);
        let mut t = tech("fdm");
        t.thresholds.insert(FeatureKind::Pin, w);
        let p = |d: f64, s: f64| {
            pcp(&FeatureInstance::new(FeatureKind::Pin, d, "pin").with_significance(s), &t, &app, None)
                .unwrap()
                .p_flaw
        };
        let direct = (1.0 - 1.0 / (1.0 + (w - d).exp())) * s;
        if (p(d, s) - direct).abs() > 1e-12 {
            return Err(format!("trial {trial}: {} vs {direct}", p(d, s)));
        }
        if (p(w, 1.0) - 0.5).abs() > 1e-12 {
            return Err(format!("trial {trial}: midpoint {}", p(w, 1.0)));
        }
        let bigger = d + rng.gen_range(0.01..5.0);
        if p(bigger, s) >= p(d, s) {
            return Err(format!("trial {trial}: not decreasing at d={d}"));
        }
    }
    Ok("1000 random (w, d, s) triples".into())
}

fn volume_ratio_check() -> Outcome {
    let l = 0.993682194;
    let v_model = 1.299e-5;
    let v_artifact = v_model / l;
    let got = volume_ratio(v_model, v_artifact).map_err(|e| e.to_string())?;
    if (got - l).abs() > 1e-9 {
        return Err(format!("{got} vs {l}"));
    }
    let mut runner = TestRunner::new(Config {
        cases: 500,
        ..Config::default()
    });
    runner
        .run(&(1e-9f64..1e3, 1e-9f64..1e3), |(a, b)| {
            let forward = volume_ratio(a, b).unwrap();
            let backward = volume_ratio(b, a).unwrap();
            prop_assert!((forward * backward - 1.0).abs() < 1e-12);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("l = {got:.9}; reciprocal holds on 500 pairs"))
}

fn curvature_sanity() -> Outcome {
    let g = gen_primitive(&PrimitiveSpec::icosphere(SPHERE_DIAMETER, 4)).map_err(|e| e.to_string())?;
    let field = mean_curvature(&g.mesh).map_err(|e| e.to_string())?;
    let target = 2.0 / SPHERE_DIAMETER;
    let within = field.mean.iter().filter(|h| (*h - target).abs() <= 0.02 * target).count();
    let fraction = within as f64 / field.mean.len() as f64;
    if fraction < 0.99 {
        return Err(format!("only {:.2}% of vertices within 2%", 100.0 * fraction));
    }
    let plate = gen_benchmark(&BenchmarkSpec::b3()).map_err(|e| e.to_string())?;
    let hist = curvature_histogram(&mean_curvature(&plate.mesh).map_err(|e| e.to_string())?, DEFAULT_BINS)
        .map_err(|e| e.to_string())?;
    if !hist.is_bimodal() {
        return Err(format!("two-dome plate histogram not bimodal: {:?}", hist.modes()));
    }
    Ok(format!("{:.2}% within 2%; plate modes {}", 100.0 * fraction, hist.modes().len()))
}

fn support_area() -> Outcome {
    let g = gen_primitive(&PrimitiveSpec::icosphere(SPHERE_DIAMETER, 6)).map_err(|e| e.to_string())?;
    let found = detect_overhangs(&g.mesh, nalgebra::Vector3::z(), 45.0).map_err(|e| e.to_string())?;
    let expected = (1.0 - 45f64.to_radians().cos()) / 2.0;
    let got = found.support_area_ratio();
    if (got - expected).abs() / expected > 0.02 {
        return Err(format!("{got} vs {expected}"));
    }
    Ok(format!("ratio {got:.5} vs {expected:.5}"))
}

fn stl_conformance() -> Outcome {
    let g = gen_primitive(&PrimitiveSpec::torus(10.0, 3.0, 3)).map_err(|e| e.to_string())?;
    let soup: Vec<_> = (0..g.mesh.triangle_count()).map(|t| g.mesh.corners(t)).collect();
    let mesh = TriangleMesh::from_triangle_soup(&soup).map_err(|e| e.to_string())?;

    let binary = write_stl(&mesh, StlFormat::BinaryStl);
    let back = parse_stl(&binary).map_err(|e| e.to_string())?;
    let coords_exact = back.triangle_count() == mesh.triangle_count()
        && (0..mesh.triangle_count()).all(|t| {
            let (a, b) = (mesh.corners(t), back.corners(t));
            (0..3).all(|i| (0..3).all(|k| (a[i][k] as f32).to_bits() == (b[i][k] as f32).to_bits()))
        });
    let rewritten = write_stl(&back, StlFormat::BinaryStl);
    if !coords_exact || parse_stl(&rewritten).map(|m| write_stl(&m, StlFormat::BinaryStl)) != Ok(rewritten) {
        return Err("binary round trip not bit-exact".into());
    }
    let ascii = parse_stl(&write_stl(&mesh, StlFormat::AsciiStl)).map_err(|e| e.to_string())?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let (ab, aa) = (surface_area(&back), surface_area(&ascii));
    let vb = signed_volume(&back, VolumePolicy::Force).map_err(|e| e.to_string())?.mm3;
    let va = signed_volume(&ascii, VolumePolicy::Force).map_err(|e| e.to_string())?.mm3;
    if rel(aa, ab) > 1e-6 || rel(va, vb) > 1e-6 {
        return Err(format!("ascii/binary disagree: area {aa} vs {ab}, volume {va} vs {vb}"));
    }

    let mut truncated = binary.clone();
    truncated.truncate(binary.len() - 20);
    let mut overcount = binary.clone();
    overcount[80..84].copy_from_slice(&(mesh.triangle_count() as u32 + 7).to_le_bytes());
    let mut solid_header = binary.clone();
    solid_header[..5].copy_from_slice(b"solid");
    let bad_ascii = b"solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0\nendloop\nendfacet\nendsolid x\n";

    let truncated_rejected = matches!(parse_stl(&truncated), Err(StlError::Truncated { .. }));
    let overcount_rejected = parse_stl(&overcount).is_err();
    let solid_binary_ok = parse_stl(&solid_header).map(|m| m.triangle_count()) == Ok(mesh.triangle_count());
    let bad_ascii_rejected = parse_stl(bad_ascii).is_err();
    let empty_rejected = matches!(parse_stl(b""), Err(StlError::Empty));
    if !(truncated_rejected && overcount_rejected && solid_binary_ok && bad_ascii_rejected && empty_rejected) {
        return Err(format!(
            "corpus: truncated {truncated_rejected}, bad count {overcount_rejected}, solid-binary {solid_binary_ok}, bad ascii {bad_ascii_rejected}, empty {empty_rejected}"
        ));
    }
    Ok(format!("{} facets round-tripped; 5 malformed cases classified", mesh.triangle_count()))
}

fn benchmark_ordering() -> Outcome {
    let app = generic();
    let opts = ScoreOptions::default();
    let plates = [BenchmarkSpec::b1(), BenchmarkSpec::b2(), BenchmarkSpec::b3()];
    let manifests: Vec<FeatureManifest> = plates
        .iter()
        .map(|spec| gen_benchmark(spec).map(|g| g.manifest).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut lines = Vec::new();
    for name in TECHS {
        let t = tech(name);
        // planar plates carry no tessellation error worth scoring, so qs is 1
        let scores: Vec<f64> = manifests
            .iter()
            .map(|m| printability(1.0, m, &t, &app, &opts).map(|r| r.score).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        lines.push(format!("{name} {:.3}/{:.3}/{:.3}", scores[0], scores[1], scores[2]));
        if !(scores[0] < scores[1] && scores[1] < scores[2]) {
            return Err(format!("ordering broken: {}", lines.join("; ")));
        }
        for (m, label) in manifests.iter().zip(["B1", "B2", "B3"]) {
            let mut previous = printability(1.0, &FeatureManifest::default(), &t, &app, &opts)
                .map_err(|e| e.to_string())?
                .score;
            for n in 1..=m.features.len() {
                let prefix = FeatureManifest::new(m.source, m.features[..n].to_vec()).map_err(|e| e.to_string())?;
                let score = printability(1.0, &prefix, &t, &app, &opts).map_err(|e| e.to_string())?.score;
                let f = &m.features[n - 1];
                let below = f.d < t.thresholds[&f.kind];
                if below && score >= previous {
                    return Err(format!("{label} on {name}: adding {} did not lower the score", f.label));
                }
                previous = score;
            }
        }
    }
    Ok(lines.join("; "))
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("global probability arithmetic", global_arithmetic),
        ("sphere global-probability table", global_table),
        ("primitive scores", primitive_scores),
        ("sphere volume and bbox convergence", sphere_convergence),
        ("logistic midpoint and monotonicity", logistic_midpoint),
        ("volume ratio", volume_ratio_check),
        ("curvature sanity", curvature_sanity),
        ("support area on a sphere", support_area),
        ("STL conformance", stl_conformance),
        ("benchmark ordering", benchmark_ordering),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
