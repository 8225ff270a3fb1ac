use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rfgap_core::io::{read_tensor_file, sha256_hex, TensorFile};
use rfgap_core::kahler::kahler_ricci;

fn rfgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfgap"))
        .args(args)
        .env_remove("RFGAP_TOL")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exit_code_table() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write(dir.path(), "malformed.json", "{\n  \"kind\": \"weyl\",\n  oops\n}");
    let unknown_kind = write(dir.path(), "unknown.json", r#"{"kind": "octonion"}"#);
    let traced = write(
        dir.path(),
        "traced.json",
        r#"{"kind":"weyl","w_plus":[[1,0,0],[0,0,0],[0,0,0]],"w_minus":[[0,0,0],[0,0,0],[0,0,0]]}"#,
    );
    let sphere = write(
        dir.path(),
        "sphere.json",
        r#"{"kind":"riemann","components":[
            {"i":0,"j":1,"k":0,"l":1,"v":1},{"i":0,"j":2,"k":0,"l":2,"v":1},{"i":0,"j":3,"k":0,"l":3,"v":1},
            {"i":1,"j":2,"k":1,"l":2,"v":1},{"i":1,"j":3,"k":1,"l":3,"v":1},{"i":2,"j":3,"k":2,"l":3,"v":1}]}"#,
    );
    let missing = dir.path().join("missing.json").to_string_lossy().into_owned();
    let worked = fixture("weyl_worked_example.json");
    let zero = fixture("zero_riemann.json");

    let table: Vec<(Vec<&str>, i32)> = vec![
        (vec!["thresholds"], 0),
        (vec!["analyze", &worked], 0),
        (vec!["analyze", &malformed], 2),
        (vec!["analyze", &unknown_kind], 2),
        (vec!["analyze", &worked, "--kind", "kahler"], 2),
        (vec!["analyze", &worked, "--tol", "-1"], 2),
        (vec!["frobnicate"], 2),
        (vec!["analyze", &traced], 3),
        (vec!["analyze", &sphere], 3),
        (vec!["analyze", &worked, "--berger-tol", "1e-300"], 0),
        (vec!["polygon", "--delta", "3"], 5),
        (vec!["polygon", "--delta", "0.25"], 5),
        (vec!["analyze", &zero], 6),
        (vec!["analyze", &missing], 7),
    ];
    for (args, code) in table {
        let out = rfgap(&args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn frame_tolerance_has_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_string_lossy().into_owned();
    assert!(rfgap(&["sample", "--count", "1", "--seed", "3", "--out", &out_dir]).status.success());
    let file = dir.path().join("sample_0000.json").to_string_lossy().into_owned();
    assert!(rfgap(&["analyze", &file]).status.success());
    let out = rfgap(&["analyze", &file, "--berger-tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Berger frame residual"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\n  \"kind\": \"weyl\",\n  oops\n}");
    let out = rfgap(&["analyze", &bad]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 3"));
}

#[test]
fn worked_examples_through_the_cli() {
    let out = rfgap(&["analyze", &fixture("weyl_worked_example.json")]);
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "weyl");
    assert_eq!(v["certificate"]["delta"], 1.0);
    assert_eq!(v["certificate"]["half_q0303"], 0.5);
    assert_eq!(v["certificate"]["sign_conclusion"], "positive");
    assert!(v.get("timings").is_none());

    let v = stdout_json(&rfgap(&["analyze", &fixture("kahler_family_b1.json")]));
    assert_eq!(v["kind"], "kahler");
    let c = &v["certificate"];
    assert!((c["h_min"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert!((c["h_max"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((c["laplacian_value"].as_f64().unwrap() + 2.0).abs() < 1e-9);
    assert_eq!(c["sign_conclusion"], "negative");
}

#[test]
fn analyze_is_byte_stable() {
    let f = fixture("weyl_worked_example.json");
    let a = rfgap(&["analyze", &f]);
    let b = rfgap(&["analyze", &f]);
    assert_eq!(a.stdout, b.stdout);
    let bytes = std::fs::read(&f).unwrap();
    assert_eq!(stdout_json(&a)["input_digest"], sha256_hex(&bytes));
    let timed = stdout_json(&rfgap(&["analyze", &f, "--timings"]));
    assert!(timed["timings"].is_object());
}

#[test]
fn tolerance_flag_and_environment() {
    let f = fixture("weyl_worked_example.json");
    let out = Command::new(env!("CARGO_BIN_EXE_rfgap"))
        .args(["analyze", &f])
        .env("RFGAP_TOL", "1e-9")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_rfgap"))
        .args(["analyze", &f])
        .env("RFGAP_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thresholds_table() {
    let out = rfgap(&["thresholds"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for digits in [
        "0.898979485566",
        "1.112372435696",
        "1.449489742783",
        "0.689897948557",
        "1.366025403784",
        "0.732050807569",
    ] {
        assert!(text.contains(digits), "{digits}");
    }
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for r in v["reciprocals"].as_array().unwrap() {
        assert_eq!(r["exact"], true);
        assert_eq!(r["product"], "1.000000000000");
    }
}

#[test]
fn polygon_reports() {
    let v = stdout_json(&rfgap(&["polygon", "--delta", "1"]));
    assert!((v["q_min"].as_f64().unwrap() + 0.5).abs() < 1e-15);
    assert!((v["bound"].as_f64().unwrap() + 0.5).abs() < 1e-15);
    assert!(v["agreement_gap"].as_f64().unwrap() < 5e-3);
    let inside_min = v["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["inside"] == true)
        .map(|c| c["value"].as_f64().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(inside_min, v["q_min"].as_f64().unwrap());

    let v = stdout_json(&rfgap(&["polygon", "--delta", "0.6"]));
    assert!((v["q_min"].as_f64().unwrap() + 0.813_333_333_333_333_3).abs() < 1e-12);
    assert_eq!(v["active_branch"], "(11δ²-14δ+2)/3");

    let v = stdout_json(&rfgap(&["polygon", "--delta", "1.5", "--remark"]));
    assert!((v["q_max"].as_f64().unwrap() - 0.25).abs() < 1e-15);

    let v = stdout_json(&rfgap(&["polygon", "--delta", "1", "--grid", "101", "--dump-grid"]));
    assert_eq!(v["grid_points"].as_array().unwrap().len(), 101 * 101);
}

#[test]
fn sample_round_trip_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_string_lossy().into_owned();
    let out = rfgap(&["sample", "--count", "3", "--seed", "7", "--out", &out_dir]);
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for entry in files {
        let path = dir.path().join(entry["file"].as_str().unwrap());
        let (tensor, digest) = read_tensor_file(&path, 1e-10).unwrap();
        assert_eq!(digest, entry["sha256"].as_str().unwrap());
        assert!(matches!(tensor, TensorFile::Weyl(_)));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(rfgap_core::io::write_tensor(&tensor), text);
    }

    let again = tempfile::tempdir().unwrap();
    let again_dir = again.path().to_string_lossy().into_owned();
    assert!(rfgap(&["sample", "--count", "3", "--seed", "7", "--out", &again_dir]).status.success());
    for name in ["sample_0000.json", "sample_0001.json", "sample_0002.json", "manifest.json"] {
        assert_eq!(
            std::fs::read(dir.path().join(name)).unwrap(),
            std::fs::read(again.path().join(name)).unwrap(),
        );
    }
}

#[test]
fn kahler_samples_are_ricci_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_string_lossy().into_owned();
    assert!(rfgap(&["sample", "--count", "4", "--seed", "11", "--kind", "kahler", "--out", &out_dir]).status.success());
    for i in 0..4 {
        let path = dir.path().join(format!("sample_{i:04}.json"));
        let (tensor, _) = read_tensor_file(&path, 1e-10).unwrap();
        let TensorFile::Kahler(k) = tensor else {
            panic!("expected a Kähler tensor");
        };
        assert!(kahler_ricci(&k).iter().all(|z| z.norm() < 1e-12));
        assert!(rfgap(&["analyze", path.to_str().unwrap()]).status.success());
    }
}

#[test]
fn sample_reports_unwritable_directory() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(dir.path(), "file", "");
    let target = format!("{blocker}/sub");
    let out = rfgap(&["sample", "--count", "1", "--out", &target]);
    assert_eq!(out.status.code(), Some(7));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sub"));
}

#[test]
fn verify_output_is_independent_of_jobs() {
    let a = rfgap(&["verify", "--suite", "berger", "--samples", "40", "--seed", "5", "--jobs", "1"]);
    let b = rfgap(&["verify", "--suite", "berger", "--samples", "40", "--seed", "5", "--jobs", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["suite"], "berger");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn polygon_suite_under_ten_seconds() {
    let start = std::time::Instant::now();
    let out = rfgap(&["verify", "--suite", "polygon", "--samples", "50"]);
    assert!(out.status.success());
    assert!(start.elapsed().as_secs_f64() < 10.0);
}
