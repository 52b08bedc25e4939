use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn printscore(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_printscore"))
        .current_dir(dir)
        .env_remove("PRINTSCORE_PROFILE_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = printscore(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(dir: &Path, args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ok(dir, &full)).expect("valid json")
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    printscore(dir, args).status.code().unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn gen_sphere_writes_mesh_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let summary = json(tmp.path(), &["gen", "sphere", "--diameter", "30", "--level", "4"]);
    assert_eq!(summary["triangle_count"], 5120);
    assert!(tmp.path().join("sphere.stl").is_file());
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("sphere.manifest.json")).unwrap()).unwrap();
    assert!(close(manifest["analytic"]["area_mm2"].as_f64().unwrap(), 900.0 * std::f64::consts::PI, 1e-9));
}

#[test]
fn gen_benchmark_ladder_lists_each_rung() {
    let tmp = TempDir::new().unwrap();
    let summary = json(
        tmp.path(),
        &["gen", "benchmark", "--walls", "0.4,0.8,1.2,1.6", "-o", "plate.stl"],
    );
    assert_eq!(summary["feature_count"], 4);
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("plate.manifest.json")).unwrap()).unwrap();
    let ds: Vec<f64> = manifest["features"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["d"].as_f64().unwrap())
        .collect();
    assert_eq!(ds, vec![0.4, 0.8, 1.2, 1.6]);
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(tmp.path(), &["gen", "sphere", "--diameter", "-3"]), 2);
    assert_eq!(code(tmp.path(), &["gen", "sphere", "--diameter", "abc"]), 2);
    assert_eq!(code(tmp.path(), &["frobnicate"]), 2);
    ok(tmp.path(), &["gen", "sphere", "--diameter", "10", "--level", "1"]);
    assert_eq!(code(tmp.path(), &["curvature", "sphere.stl", "--bins", "0"]), 2);
    assert_eq!(code(tmp.path(), &["score", "sphere.stl", "--tech", "laser_cutter"]), 2);
    assert_eq!(code(tmp.path(), &["score", "sphere.stl", "--k", "1.5"]), 2);
    assert_eq!(code(tmp.path(), &["--format", "csv", "score", "sphere.stl"]), 2);
}

#[test]
fn unreadable_input_is_a_runtime_failure() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(tmp.path(), &["inspect", "missing.stl"]), 1);
    std::fs::write(tmp.path().join("junk.stl"), b"solid x\nfacet normal 0 0 1\n").unwrap();
    assert_eq!(code(tmp.path(), &["inspect", "junk.stl"]), 1);
}

#[test]
fn inspect_reports_cube_volume() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "box", "--extents", "10,20,30", "-o", "cube.stl"]);
    let r = json(tmp.path(), &["inspect", "cube.stl"]);
    assert!(close(r["volume"]["mm3"].as_f64().unwrap(), 6000.0, 1e-6));
    assert!(close(r["volume"]["m3"].as_f64().unwrap(), 6e-6, 1e-15));
    assert!(close(r["area_mm2"].as_f64().unwrap(), 2200.0, 1e-6));
    assert_eq!(r["triangle_count"], 12);
    assert_eq!(r["diagnostics"]["is_watertight"], true);
}

#[test]
fn inspect_open_mesh_omits_volume() {
    let tmp = TempDir::new().unwrap();
    let stl = "solid open\n facet normal 0 0 1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n  endloop\n endfacet\nendsolid open\n";
    std::fs::write(tmp.path().join("open.stl"), stl).unwrap();
    let r = json(tmp.path(), &["inspect", "open.stl"]);
    assert!(r["volume"].is_null());
    assert_eq!(r["diagnostics"]["is_watertight"], false);
    assert!(!r["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn curvature_separates_flat_and_rounded_regions() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "benchmark", "--preset", "b3", "-o", "b3.stl"]);
    let r = json(tmp.path(), &["curvature", "b3.stl", "--bins", "32"]);
    assert_eq!(r["bins"], 32);
    assert_eq!(r["edges"].as_array().unwrap().len(), 33);
    assert_eq!(r["bimodal"], true);

    let csv = ok(tmp.path(), &["--format", "csv", "curvature", "b3.stl", "--bins", "32"]);
    assert_eq!(csv.lines().count(), 33);
}

#[test]
fn score_without_reference_matches_fdm_global_term() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "sphere", "--diameter", "30", "--level", "3"]);
    let r = json(tmp.path(), &["score", "sphere.stl"]);
    let report = &r["results"][0]["report"];
    assert!(close(report["score"].as_f64().unwrap(), 98.40937602250001, 1e-9));
    assert_eq!(report["qs"], 1.0);
    assert!(report["provenance"]["reference"].is_null());
    assert!(!report["warnings"].as_array().unwrap().is_empty());

    // the analytic record in the manifest supplies the reference
    let r = json(tmp.path(), &["score", "sphere.stl", "--manifest", "sphere.manifest.json"]);
    let report = &r["results"][0]["report"];
    assert!(report["qs"].as_f64().unwrap() < 1.0);
    assert_eq!(report["provenance"]["reference"]["source"]["kind"], "analytic");
}

#[test]
fn manifest_wall_scales_the_score() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "box", "--extents", "20,20,5", "-o", "part.stl"]);
    let manifest = r#"{"schema_version":1,"units":"mm","source":"declared","features":[{"kind":"supported_wall","d":0.4,"label":"rib"}]}"#;
    std::fs::write(tmp.path().join("walls.json"), manifest).unwrap();
    let r = json(
        tmp.path(),
        &["score", "part.stl", "--manifest", "walls.json", "--reference-area", "1200"],
    );
    let report = &r["results"][0]["report"];
    let feature = &report["features"][0];
    assert_eq!(feature["label"], "rib");
    assert!(close(feature["p_flaw"].as_f64().unwrap(), 0.299343830056226, 1e-12));
    assert!(close(report["score"].as_f64().unwrap(), 68.95113649048153, 1e-9));
    assert_eq!(report["classification"], "risky");
}

#[test]
fn compare_ranks_technologies_with_per_term_detail() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "sphere", "--diameter", "30", "--level", "2"]);
    let r = json(tmp.path(), &["compare", "sphere.stl"]);
    let ranking = r["ranking"].as_array().unwrap();
    let names: Vec<&str> = ranking.iter().map(|x| x["technology"].as_str().unwrap()).collect();
    assert_eq!(names, ["material_jetting", "binder_jetting", "fdm"]);
    let scores: Vec<f64> = ranking.iter().map(|x| x["score"].as_f64().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    for report in ranking {
        assert_eq!(report["defect_scores"].as_array().unwrap().len(), 4);
    }

    let subset = json(tmp.path(), &["compare", "sphere.stl", "--techs", "fdm,binder"]);
    assert_eq!(subset["ranking"].as_array().unwrap().len(), 2);
}

#[test]
fn json_output_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "benchmark", "--preset", "b1", "-o", "b1.stl"]);
    let args = ["--format", "json", "score", "b1.stl", "--detect", "--manifest", "b1.manifest.json"];
    assert_eq!(ok(tmp.path(), &args), ok(tmp.path(), &args));
}

#[test]
fn text_and_json_agree_on_numbers() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "torus", "--major-radius", "10", "--minor-radius", "4"]);
    let args = ["score", "torus.stl", "--manifest", "torus.manifest.json", "--tech", "binder_jetting"];
    let r = json(tmp.path(), &args);
    let report = &r["results"][0]["report"];
    let text = ok(tmp.path(), &args);
    let field = |name: &str| -> String {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{name}: ")))
            .unwrap()
            .to_owned()
    };
    assert_eq!(field("score").parse::<f64>().unwrap(), report["score"].as_f64().unwrap());
    assert_eq!(field("qs").parse::<f64>().unwrap(), report["qs"].as_f64().unwrap());
    assert_eq!(
        field("p_global_success").parse::<f64>().unwrap(),
        report["p_global_success"].as_f64().unwrap()
    );
}

#[test]
fn batch_follows_sorted_input_order() {
    let tmp = TempDir::new().unwrap();
    for (name, stacks) in [("c.stl", "20"), ("a.stl", "7"), ("b.stl", "61")] {
        ok(tmp.path(), &["gen", "sphere", "--diameter", "30", "--stacks", stacks, "-o", name]);
    }
    let r = json(tmp.path(), &["score", "--inputs", "*.stl", "--same-solid"]);
    let results = r["results"].as_array().unwrap();
    let inputs: Vec<&str> = results.iter().map(|x| x["input"].as_str().unwrap()).collect();
    assert_eq!(inputs, ["a.stl", "b.stl", "c.stl"]);
    // the finest tessellation is its own reference
    assert_eq!(results[1]["report"]["qs"], 1.0);
    assert!(results[0]["report"]["qs"].as_f64().unwrap() < results[2]["report"]["qs"].as_f64().unwrap());
}

#[test]
fn profile_directory_overrides_builtins() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["gen", "sphere", "--diameter", "20", "--level", "1"]);
    let dir = tmp.path().join("profiles");
    std::fs::create_dir(&dir).unwrap();
    let app = r#"{"schema_version":1,"name":"lenient","k":{"accuracy":0,"surface_texture":0,"abnormalities":0,"support_construction":0},"s":{}}"#;
    std::fs::write(dir.join("lenient.json"), app).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_printscore"))
        .current_dir(tmp.path())
        .env("PRINTSCORE_PROFILE_DIR", &dir)
        .args(["--format", "json", "score", "sphere.stl", "--app", "lenient"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"][0]["report"]["score"], 100.0);
}
