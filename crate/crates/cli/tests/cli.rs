use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn casurf<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_casurf")).args(args).output().expect("run casurf")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn generate(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["generate", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    casurf(args)
}

#[test]
fn generate_geodesic_obj() {
    let dir = tempfile::tempdir().unwrap();
    let o = generate(dir.path(), &["--theta", "60deg", "--curve", "geodesic", "--export", "obj"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let obj = std::fs::read_to_string(dir.path().join("surface.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 41 * 41);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 40 * 40);
    let csv = std::fs::read_to_string(dir.path().join("vertices.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("u,v,K,angle_residual"));
    let desc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("surface.json")).unwrap()).unwrap();
    assert_eq!(desc["kind"], "general");
    let out = stdout_json(&o);
    assert_eq!(out["config"]["curve"], "geodesic");
    assert_eq!(out["mesh"]["vertices"], 1681);
}

#[test]
fn generate_selects_trivial_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let o = generate(dir.path(), &["--theta", "0deg"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout_json(&o)["kind"]["SliceAtT0"].is_object());
    let o = generate(dir.path(), &["--theta", "90deg", "--curve", "circle:1.0", "--export", "ply"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout_json(&o);
    assert_eq!(out["kind"], "Cylinder");
    assert_eq!(out["mesh"]["welded"], true);
    assert!(std::fs::read_to_string(dir.path().join("surface.ply")).unwrap().contains("element vertex 1640\n"));
}

#[test]
fn generate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--theta", "60"][..],
        &["--curve", "geodesic"],
        &["--theta", "100deg"],
        &["--theta", "30deg", "--curve", "ellipse:2"],
        &["--theta", "30deg", "--u", "1:-1"],
        &["--theta", "30deg", "--curve", "sampled:/nonexistent/points.txt"],
        // crosses the degeneracy locus u = 2/√3
        &["--theta", "30deg", "--curve", "circle:1", "--u", "-3:3"],
        &["--theta", "30deg", "--nu", "1", "--export", "obj"],
    ] {
        let o = generate(dir.path(), args);
        assert_eq!(code(&o), 2, "{args:?}");
    }
}

#[test]
fn generate_clips_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let o = generate(dir.path(), &["--theta", "30deg", "--curve", "circle:1", "--u", "-3:3", "--clip"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let hi = stdout_json(&o)["u"][1].as_f64().unwrap();
    assert!(hi < 2.0 / 3f64.sqrt() && hi > 1.15, "{hi}");
}

#[test]
fn generate_sampled_curve_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    let mut text = String::from("# closed\n");
    for i in 0..64 {
        let phi = std::f64::consts::TAU * i as f64 / 64.0;
        let r = 0.8f64;
        text += &format!("{} {} {}\n", r.sinh() * phi.cos(), r.sinh() * phi.sin(), r.cosh());
    }
    std::fs::write(&pts, text).unwrap();
    let cfg = dir.path().join("cfg.json");
    let settings = serde_json::json!({"theta": "45deg", "curve": format!("sampled:{}", pts.display()), "u": "-0.2:0.2", "nu": 5, "nv": 65, "export": "obj"});
    std::fs::write(&cfg, settings.to_string()).unwrap();
    // flag wins over the file
    let o = generate(dir.path(), &["--config", cfg.to_str().unwrap(), "--nu", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout_json(&o);
    assert_eq!(out["config"]["nu"], 7);
    assert_eq!(out["mesh"]["welded"], true);
    assert_eq!(out["mesh"]["vertices"], 7 * 64);

    std::fs::write(&cfg, r#"{"theta": "45deg", "colour": "red"}"#).unwrap();
    assert_eq!(code(&generate(dir.path(), &["--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&generate(dir.path(), &["--theta", "60deg"])), 0);
    let desc = dir.path().join("surface.json");
    let o = casurf(["verify", desc.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout_json(&o);
    assert_eq!(report["pass"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 10);

    let mut bad: Value = serde_json::from_str(&std::fs::read_to_string(&desc).unwrap()).unwrap();
    bad["corruption"] = serde_json::json!({"type": "scale_hyperboloid", "amount": 0.01});
    let corrupted = dir.path().join("corrupted.json");
    std::fs::write(&corrupted, bad.to_string()).unwrap();
    let o = casurf(["verify", corrupted.to_str().unwrap(), "--check", "angle"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["checks"][0]["pass"], false);

    let malformed = dir.path().join("malformed.json");
    std::fs::write(&malformed, "{\"theta\": 0.5, ").unwrap();
    assert_eq!(code(&casurf(["verify", malformed.to_str().unwrap()])), 2);
    assert_eq!(code(&casurf(["verify", "/nonexistent.json"])), 2);
    assert_eq!(code(&casurf(["verify", desc.to_str().unwrap(), "--check", "curvature"])), 2);
    assert_eq!(code(&casurf(["verify", desc.to_str().unwrap(), "--nu", "0"])), 2);
    assert_eq!(code(&casurf(["verify", desc.to_str().unwrap(), "--tolerance-scale", "-1"])), 2);
    assert_eq!(code(&casurf(["verify"])), 2);
}

#[test]
fn verify_is_reproducible_from_echoed_config() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&generate(dir.path(), &["--theta", "40deg", "--curve", "hypercycle:0.5"])), 0);
    let desc = dir.path().join("surface.json");
    let first = dir.path().join("first.json");
    let o = casurf([
        "verify",
        desc.to_str().unwrap(),
        "--nu",
        "9",
        "--nv",
        "11",
        "--h",
        "0.02",
        "--json",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let first: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let cfg = dir.path().join("cfg.json");
    let mut echoed = first["config"].clone();
    echoed.as_object_mut().unwrap().remove("json");
    std::fs::write(&cfg, echoed.to_string()).unwrap();
    let o = casurf(["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut second = stdout_json(&o);
    second["config"]["json"] = first["config"]["json"].clone();
    assert_eq!(second, first);
    assert_eq!(first["grid"]["nu"], 9);
}

#[test]
fn ode_branches_and_exit_codes() {
    let o = casurf(["ode", "--theta", "45deg", "--lambda0", "0"]);
    assert_eq!(code(&o), 0);
    let out = stdout_json(&o);
    assert_eq!(out["branch"]["kind"], "tanh");
    assert!(out["closed_form_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(out["steps"], 2000);

    let o = casurf(["ode", "--theta", "45deg", "--lambda0", "sin(45deg)"]);
    assert_eq!(stdout_json(&o)["branch"]["kind"], "const");

    let o = casurf(["ode", "--theta", "45deg", "--lambda0", "1.2*sin"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["branch"]["kind"], "coth");
    assert!(String::from_utf8_lossy(&o.stderr).contains("closed-form max error"));

    let o = casurf(["ode", "--theta", "45deg", "--lambda0", "-1.2*sin"]);
    assert_eq!(code(&o), 0);
    let out = stdout_json(&o);
    assert_eq!(out["branch"]["kind"], "blowup");
    let pole = out["closed_form_pole"].as_f64().unwrap();
    assert!((out["branch"]["u_star"].as_f64().unwrap() - pole).abs() < 1e-2);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("l.csv");
    let o = casurf(["ode", "--theta", "30deg", "--csv", csv.to_str().unwrap(), "--step", "0.1", "--max-error", "1e-4"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("u,lambda,beta"));
    assert_eq!(text.lines().count(), 22);

    assert_eq!(code(&casurf(["ode", "--theta", "45deg", "--max-error", "1e-30", "--lambda0", "0.3"])), 1);
    assert_eq!(code(&casurf(["ode", "--theta", "90deg"])), 2);
    assert_eq!(code(&casurf(["ode", "--lambda0", "0"])), 2);
    assert_eq!(code(&casurf(["ode", "--theta", "45deg", "--step", "0"])), 2);
    assert_eq!(code(&casurf(["ode", "--theta", "45deg", "--lambda0", "sin(45)"])), 2);
}

#[test]
fn suite_budget_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suite.json");
    let o = casurf(["suite", "--nu", "11", "--nv", "11", "--json", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["config", "elapsed_seconds", "negative_controls", "pass", "surfaces"]);
    assert_eq!(v["surfaces"].as_array().unwrap().len(), 18);
    assert_eq!(v["negative_controls"].as_array().unwrap().len(), 10);
    for s in v["surfaces"].as_array().unwrap() {
        assert_eq!(s["report"]["checks"].as_array().unwrap().len(), 10);
    }

    let o = casurf(["suite", "--nu", "11", "--nv", "11", "--tolerance-scale", "1e-6"]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert!(v["surfaces"].as_array().unwrap().iter().any(|s| s["pass"] == false));

    assert_eq!(code(&casurf(["suite", "--tolerance-scale", "0"])), 2);
    assert_eq!(code(&casurf(["suite", "--bogus"])), 2);
}
