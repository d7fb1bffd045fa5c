use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_concyclic"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SQUARE: &str = r#"{"points": [[1,0],[0,1],[-1,0],[0,-1]]}"#;

#[test]
fn inscribe_circle_square_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let curve = write(&dir, "circle.json", r#"{"circle": 1.0}"#);
    let quad = write(&dir, "square.json", SQUARE);
    let (j1, j2, fig) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.svg"));
    let out = run(&["inscribe", "--curve", s(&curve), "--quad", s(&quad), "--json", s(&j1), "--svg", s(&fig)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["inscribe", "--curve", s(&curve), "--quad", s(&quad), "--json", s(&j2)]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&j1).unwrap(), std::fs::read(&j2).unwrap());
    let report = json(&j1);
    assert_eq!(report["alternative"], 1);
    assert!(std::fs::read_to_string(&fig).unwrap().contains("<svg"));
}

#[test]
fn non_concyclic_quad_exits_2() {
    let dir = TempDir::new().unwrap();
    let curve = write(&dir, "circle.json", r#"{"circle": 1.0}"#);
    let quad = write(&dir, "bad.json", r#"{"points": [[1,0],[0,1],[-1,0],[0.3,-2]]}"#);
    let out = run(&["inscribe", "--curve", s(&curve), "--quad", s(&quad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cross-ratio defect"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let curve = write(&dir, "broken.json", r#"{"circle": "#);
    let quad = write(&dir, "square.json", SQUARE);
    let out = run(&["inscribe", "--curve", s(&curve), "--quad", s(&quad)]);
    assert_eq!(out.status.code(), Some(2));
    let good = write(&dir, "circle.json", r#"{"circle": 1.0}"#);
    let out = run(&["inscribe", "--curve", s(&good), "--quad", s(&quad), "--tol-report", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sphere-ce", "spread", "--a", "0", "--b", "0.1", "--starts", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn areas_on_perturbed_ellipse() {
    let dir = TempDir::new().unwrap();
    let curve = write(&dir, "pellipse.json", r#"{"ellipse": [1.5, 1.0], "perturb": {"magnitude": 0.02, "seed": 4}}"#);
    let quad = write(&dir, "square.json", SQUARE);
    let out_path = dir.path().join("areas.json");
    let out = run(&["areas", "--curve", s(&curve), "--quad", s(&quad), "--json", s(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out_path);
    let comp = &v["components"][0];
    for key in ["s_a", "s_b", "s_c", "s_d", "max_deviation"] {
        assert!(comp[key].is_number());
    }
    assert!(comp["relative_deviation"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn trace_dumps_periodic_paths() {
    let dir = TempDir::new().unwrap();
    let curve = write(&dir, "ellipse.json", r#"{"ellipse": [2.0, 1.0]}"#);
    let quad = write(&dir, "square.json", SQUARE);
    let (out_path, fig) = (dir.path().join("trace.json"), dir.path().join("trace.svg"));
    let out = run(&["trace", "--curve", s(&curve), "--quad", s(&quad), "--json", s(&out_path), "--svg", s(&fig)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out_path);
    assert_eq!(v["vertical_index"], 1);
    let periodic = v["paths"].as_array().unwrap().iter().find(|p| p["period_shift"] == 1).unwrap();
    assert!(periodic["samples"].as_array().unwrap().len() > 100);
    assert!(fig.exists());
}

#[test]
fn osculate_lists_chords() {
    let dir = TempDir::new().unwrap();
    let curve = write(&dir, "ellipse.json", r#"{"ellipse": [2.0, 1.0]}"#);
    let out_path = dir.path().join("osc.json");
    let out = run(&["osculate", "--curve", s(&curve), "--alpha", "3.14159", "--json", s(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out_path);
    assert!(v["solutions"].as_array().unwrap().len() >= 4);
    assert_eq!(v["continuum"], false);
}

#[test]
fn sphere_build_reports_every_check() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&["sphere-ce", "build", "--out", s(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out_path);
    let checks = v["checks"].as_array().unwrap().iter().chain(v["obstruction"]["checks"].as_array().unwrap());
    for c in checks {
        assert_eq!(c["passed"], true, "{c}");
        assert!(c["worst"].is_number() && c["samples"].as_u64().unwrap() > 0);
    }
}

#[test]
fn sphere_spread_emits_rotation() {
    let out = run(&["sphere-ce", "spread", "--a", "0.05", "--b", "0.08", "--starts", "4", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["field"]["value"].as_f64().unwrap() >= 0.0);
    assert!(v["control"]["value"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["field"]["rotation"].as_array().unwrap().len(), 9);
}
