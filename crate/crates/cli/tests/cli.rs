use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gan")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn error_doc(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON document")
}

fn csv_column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let c = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(c).unwrap().parse().unwrap()).collect()
}

#[test]
fn table1_passes_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cmp.csv");
    let out = gan(&["table1", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 10);
    let ours = csv_column(&text, "qubits_ours");
    let published = csv_column(&text, "qubits_published");
    assert_eq!(ours, published);
}

#[test]
fn estimate_writes_json_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let txt = dir.path().join("r.txt");
    for p in [&json, &txt] {
        let out = gan(&["estimate", "--preset", "Junction_1", "--steps", "1000", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["resources"]["total_qubits"], 212);
    assert!(fs::read_to_string(&txt).unwrap().contains("total qubits     212"));
}

#[test]
fn dump_ir_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let ir = dir.path().join("step.ir");
    let toy = data("data/toy.json");
    let out =
        gan(&["estimate", "--toy", toy.to_str().unwrap(), "--model-seed", "1", "--dump-ir", ir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = fs::read_to_string(&ir).unwrap();
    let golden = data("golden/toy_step.ir");
    if std::env::var_os("GAN_UPDATE_GOLDEN").is_some() {
        fs::write(&golden, &got).unwrap();
    }
    assert_eq!(got, fs::read_to_string(golden).unwrap());
}

#[test]
fn input_errors_exit_2_with_json() {
    let out = gan(&["estimate", "--model", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_doc(&out)["error"], "Io");

    let out = gan(&["estimate", "--preset", "NoSuchTask"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_doc(&out)["message"].as_str().unwrap().contains("NoSuchTask"));

    let out = gan(&["simulate", data("data/junction_w0.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "--seed is mandatory");

    let out = gan(&["estimate", "--preset", "PhotoCT_1", "--steps", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_doc(&out)["error"], "InvalidArgument");
}

#[test]
fn model_round_trips_through_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    assert!(gan(&["model", "--preset", "scattering-small", "--out", path.to_str().unwrap()]).status.success());
    let out =
        gan(&["estimate", "--model", path.to_str().unwrap(), "--out", dir.path().join("r.json").to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["resources"]["total_qubits"], 196);
}

#[test]
fn decoupled_junction_current_is_flat_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = data("data/junction_w0.json");
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = gan(&["simulate", cfg.to_str().unwrap(), "--seed", "11", "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let a = run("a");
    let b = run("b");
    let csv = fs::read_to_string(a.join("trajectory.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(b.join("trajectory.csv")).unwrap());
    for col in ["I_L", "I_junction"] {
        assert!(csv_column(&csv, col).iter().all(|i| i.abs() < 1e-10), "{col}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["steps"], 20);
    assert_eq!(manifest["evolution"]["mode"], "exact_fragments");
    assert_eq!(manifest["model_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn schedule_must_be_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(data("data/junction_w0.json")).unwrap()).unwrap();
    cfg["time_span"] = 2.0.into();
    let path = dir.path().join("bad.json");
    fs::write(&path, cfg.to_string()).unwrap();
    let out = gan(&["simulate", path.to_str().unwrap(), "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_doc(&out)["error"], "InvalidArgument");
}

#[test]
fn verify_small_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("checks.json");
    let out = gan(&["verify", "--small", "--json", json.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert!(report["checks"].as_array().unwrap().len() >= 6);
}
