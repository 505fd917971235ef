use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, body: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(body).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

/// Run the binary, returning the exit code, stderr and parsed report.
fn run(args: &[&str], out: &Path) -> (i32, String, Option<Value>) {
    let o = Command::new(env!("CARGO_BIN_EXE_slag-moduli"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    let report = fs::read_to_string(out.join("report.json"))
        .ok()
        .map(|s| serde_json::from_str(&s).unwrap());
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned(), report)
}

fn quartic(n: usize) -> Value {
    json!({"kind": "quartic", "lower": [-0.5, -0.5], "upper": [0.5, 0.5], "resolution": [n, n]})
}

#[test]
fn family_scan_standard_model_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "scan.json", &json!({"family": "std:2"}));
    let (code, _, report) = run(&["family-scan", "--config", &cfg], tmp.path());
    assert_eq!(code, 0);
    let r = report.unwrap();
    assert!(r["claims"]["thm3"]["residual"].as_f64().unwrap() < 1e-10);
    for claim in ["prop1", "prop2", "prop3", "thm3", "mclean"] {
        assert_eq!(r["claims"][claim]["pass"], json!(true), "{claim}");
    }
    let csv = fs::read_to_string(tmp.path().join("scan.csv")).unwrap();
    assert!(csv.starts_with("t_1,t_2,vol_H1,vol_Hn1,vol_fiber,lag_residual,metric_residual"));
}

#[test]
fn semiflat_quartic_fails_prop5() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "q.json", &json!({"potential": quartic(33)}));
    let (code, _, report) = run(&["semiflat", "--config", &cfg, "--oracle"], tmp.path());
    assert_eq!(code, 1);
    let r = report.unwrap();
    assert_eq!(r["claims"]["prop5"]["pass"], json!(false));
    assert!(r["ricci_max"].as_f64().unwrap() > 0.5);
    assert_eq!(r["checks"]["ricci_flat"]["pass"], json!(false));
    assert_eq!(r["checks"]["ricci_oracle"]["pass"], json!(true));
}

#[test]
fn semiflat_closed_form_passes() {
    let tmp = TempDir::new().unwrap();
    let pot = json!({"kind": "ma-example", "lower": [-0.5, 1.0], "upper": [0.5, 2.0], "resolution": [33, 33]});
    let cfg = write(tmp.path(), "s.json", &json!({"potential": pot}));
    let (code, err, report) = run(&["semiflat", "--config", &cfg], tmp.path());
    assert_eq!(code, 0, "{err}");
    let r = report.unwrap();
    for key in ["ma_residual_max", "norm_variation", "ricci_max", "kahler_residual"] {
        assert!(r[key].is_number(), "{key}");
    }
    assert!(tmp.path().join("ricci.csv").exists());
}

#[test]
fn degree_mismatch_is_an_input_error() {
    let tmp = TempDir::new().unwrap();
    let model = json!({
        "n": 2,
        "lattice": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
        "omega": {"degree": 2, "coeffs": {"1,3": 1.0, "2,4": 1.0}},
        "omega1": {"degree": 3, "coeffs": {"1,2,3": 1.0}},
        "omega2": {"degree": 2, "coeffs": {"1,2": 1.0}}
    });
    let cfg = write(tmp.path(), "bad.json", &json!({"model": model}));
    let (code, err, report) = run(&["cy-validate", "--config", &cfg], tmp.path());
    assert_eq!(code, 2);
    assert_eq!(err.trim().lines().count(), 1);
    assert!(report.is_none());
}

#[test]
fn standard_model_validates() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "m.json", &json!({"model": "std:3"}));
    let (code, _, report) = run(&["cy-validate", "--config", &cfg], tmp.path());
    assert_eq!(code, 0);
    assert_eq!(report.unwrap()["checks"].as_object().unwrap().len(), 6);
}

#[test]
fn bad_invocations_exit_2() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("missing.json");
    let (code, err, _) = run(&["gh", "--config", missing.to_str().unwrap()], tmp.path());
    assert_eq!((code, err.trim().lines().count()), (2, 1));
    let (code, _, _) = run(&["no-such-command", "--config", "x.json"], tmp.path());
    assert_eq!(code, 2);
    let broken = tmp.path().join("broken.json");
    fs::write(&broken, "{\"model\": ").unwrap();
    let (code, err, _) = run(&["cy-validate", "--config", broken.to_str().unwrap()], tmp.path());
    assert_eq!((code, err.trim().lines().count()), (2, 1));
    let ok = write(tmp.path(), "ok.json", &json!({"model": "std:1"}));
    let (code, _, _) = run(&["cy-validate", "--config", &ok, "--tol", "-1"], tmp.path());
    assert_eq!(code, 2);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "l.json",
        &json!({"potential": {"kind": "quadratic", "lower": [-1, -1], "upper": [1, 1], "resolution": [17, 17], "coefficients": [2.0, 0.5]}}),
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(run(&["legendre", "--config", &cfg], &a).0, 0);
    assert_eq!(run(&["legendre", "--config", &cfg], &b).0, 0);
    for f in ["report.json", "dual.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(fs::read_to_string(a.join("run.log")).unwrap().lines().count(), 1);
}

#[test]
fn ma_solve_and_partial_legendre() {
    let tmp = TempDir::new().unwrap();
    let boundary = json!({"kind": "ma-example", "lower": [-0.5, 1.0], "upper": [0.5, 2.0], "resolution": [33, 33]});
    let cfg = write(tmp.path(), "m.json", &json!({"c": 1.0, "tol": 1e-10, "boundary": boundary}));
    let (code, err, report) = run(&["ma-solve", "--config", &cfg], tmp.path());
    assert_eq!(code, 0, "{err}");
    assert_eq!(report.unwrap()["claims"]["prop3"]["pass"], json!(true));
    let cfg = write(tmp.path(), "p.json", &json!({"potential": quartic(33)}));
    let (code, _, report) = run(&["partial-legendre", "--config", &cfg], tmp.path());
    assert_eq!(code, 1);
    assert!(report.unwrap()["claims"]["prop3"]["residual"].as_f64().unwrap() > 0.1);
}

#[test]
fn solver_nonconvergence_is_recorded() {
    let tmp = TempDir::new().unwrap();
    let boundary = json!({"kind": "ma-example", "lower": [-0.5, 1.0], "upper": [0.5, 2.0], "resolution": [33, 33]});
    let cfg = write(tmp.path(), "m.json", &json!({"c": 1.0, "tol": 1e-10, "max_iter": 1, "boundary": boundary}));
    let (code, _, report) = run(&["ma-solve", "--config", &cfg], tmp.path());
    assert_eq!(code, 1);
    let r = report.unwrap();
    assert_eq!(r["claims"]["prop3"]["pass"], json!(false));
    assert!(r["error"].is_string());
}

#[test]
fn gh_and_embed_commands() {
    let tmp = TempDir::new().unwrap();
    let v = json!({"kind": "affine", "lower": [-0.5, -0.5], "upper": [0.5, 0.5], "resolution": [33, 33], "coefficients": [1.0, 0.0], "offset": 2.0});
    let cfg = write(tmp.path(), "g.json", &json!({"V": v}));
    let (code, err, _) = run(&["gh", "--config", &cfg], tmp.path());
    assert_eq!(code, 0, "{err}");
    let cfg = write(tmp.path(), "e.json", &json!({"family": "std:2"}));
    let (code, _, report) = run(&["embed", "--config", &cfg], tmp.path());
    assert_eq!(code, 0);
    assert_eq!(report.unwrap()["checks"]["mirror_involution"]["pass"], json!(true));
    assert!(tmp.path().join("chart.csv").exists());
}
