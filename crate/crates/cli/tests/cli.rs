use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const ANNULUS: &str = r#"{
  "outer": { "center": ["0", "0"], "radius": "1" },
  "holes": [{ "center": ["0", "0"], "radius": "0.5" }],
  "base_point": ["0.7071067811865476", "0"]
}"#;

struct Run {
    dir: tempfile::TempDir,
}

impl Run {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("annulus.json"), ANNULUS).unwrap();
        Run { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn manifest(&self, name: &str, body: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn exec(&self, cmd: &str, manifest: &Path, extra: &[&str], env: &[(&str, &str)]) -> Output {
        let mut c = Command::new(env!("CARGO_BIN_EXE_royden-lab"));
        c.arg(cmd).arg("--manifest").arg(manifest).arg("--out").arg(self.path("out")).args(extra);
        c.env_remove("ROYDEN_LAB_TOL");
        for (k, v) in env {
            c.env(k, v);
        }
        c.output().unwrap()
    }

    fn json(&self, rel: &str) -> Value {
        serde_json::from_str(&std::fs::read_to_string(self.path(rel)).unwrap()).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const SMALL: &str = r#""m": 128, "k_solve": 48"#;

#[test]
fn measure_annulus_period_and_mass() {
    let r = Run::new();
    let m = r.manifest("annulus-measure.json", &format!(r#"{{ "domain": "annulus.json", {SMALL} }}"#));
    let o = r.exec("measure", &m, &[], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = r.json("out/annulus-measure/report.json");
    let p11 = rep["period_matrix"][0][0].as_f64().unwrap();
    let expected = 2.0 * std::f64::consts::PI / 0.5f64.ln();
    assert!((p11 - expected).abs() < 1e-6, "p11 = {p11}");
    assert!((rep["component_mass"][1].as_f64().unwrap() - 0.5).abs() < 1e-7);
    let csv = std::fs::read_to_string(r.path("out/annulus-measure/period_matrix.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(csv.lines().next(), Some("p_1"));
    let omega = std::fs::read_to_string(r.path("out/annulus-measure/omega.csv")).unwrap();
    assert_eq!(omega.lines().count(), 1 + 2 * 128);
    let meta = r.json("out/annulus-measure/meta.json");
    assert_eq!(meta["status"], "ok");
    assert!(rep.get("elapsed_seconds").is_none());
}

#[test]
fn factor_reports_winding_and_moduli() {
    let r = Run::new();
    let m = r.manifest("f.json", &format!(r#"{{ "domain": "annulus.json", {SMALL}, "corpus": ["w*(w-2)"] }}"#));
    let o = r.exec("factor", &m, &[], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = r.json("out/f/report.json");
    let f = &rep["functions"][0]["factor"];
    assert_eq!(f["winding"], serde_json::json!([1]));
    let moduli: Vec<f64> = f["component_moduli"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((moduli[0] - 1.0).abs() < 1e-9 && (moduli[1] - 0.5).abs() < 1e-8, "{moduli:?}");
    assert!(f["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn malformed_domain_exits_2_with_record() {
    let r = Run::new();
    let m = r.manifest(
        "bad.json",
        r#"{ "domain": { "outer": { "center": ["0", "0"], "radius": "1" },
             "holes": [{ "center": ["0.8", "0"], "radius": "0.5" }], "base_point": ["-0.5", "0"] } }"#,
    );
    let o = r.exec("measure", &m, &[], &[]);
    assert_eq!(code(&o), 2);
    let rec = r.json("out/error.json");
    assert_eq!(rec["error"], "ContainmentError");
    assert_eq!(rec["exit_code"], 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ContainmentError"));
}

#[test]
fn numerical_failure_exits_3() {
    let r = Run::new();
    let m = r.manifest("z.json", &format!(r#"{{ "domain": "annulus.json", {SMALL}, "corpus": ["w-1"] }}"#));
    let o = r.exec("factor", &m, &[], &[]);
    assert_eq!(code(&o), 3);
    assert_eq!(r.json("out/z/error.json")["error"], "BoundaryZeroError");
    assert_eq!(r.json("out/z/meta.json")["status"], "BoundaryZeroError");
}

#[test]
fn config_mistakes_exit_2() {
    let r = Run::new();
    let cases = [
        ("beurling", r#"{ "domain": "annulus.json", "k": 8, "degrees": [6], "corpus": ["w"] }"#),
        ("measure", r#"{ "command": "factor", "domain": "annulus.json" }"#),
        ("measure", r#"{ "domain": "annulus.json", "bogus": 1 }"#),
        ("measure", r#"{ "domain": "missing.json" }"#),
        ("measure", r#"{ "domain": "annulus.json", "tolerances": { "nope": 1e-3 } }"#),
        ("gauge", r#"{ "domain": "annulus.json", "gauge": { "kind": "p", "p": 0.5 }, "corpus": ["w"] }"#),
    ];
    for (cmd, body) in cases {
        let m = r.manifest("c.json", body);
        let o = r.exec(cmd, &m, &[], &[]);
        assert_eq!(code(&o), 2, "{body}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(r.json("out/error.json")["exit_code"], 2);
    }
}

#[test]
fn reports_are_deterministic_across_runs_and_jobs() {
    let r = Run::new();
    let body = format!(
        r#"[{{ "name": "a", "domain": "annulus.json", {SMALL}, "gauge": {{ "kind": "p", "p": 3 }}, "corpus": ["w-2"] }},
           {{ "name": "b", "domain": "annulus.json", {SMALL},
              "gauge": {{ "kind": "sum", "terms": [{{ "w": 0.5, "p": 1 }}, {{ "w": 0.5, "p": 2 }}] }}, "corpus": ["w"] }}]"#
    );
    let m = r.manifest("g.json", &body);
    assert_eq!(code(&r.exec("gauge", &m, &[], &[])), 0);
    let first: Vec<Vec<u8>> =
        ["a", "b"].iter().map(|n| std::fs::read(r.path(&format!("out/{n}/report.json"))).unwrap()).collect();
    assert_eq!(code(&r.exec("gauge", &m, &["--jobs", "2"], &[])), 0);
    for (n, before) in ["a", "b"].iter().zip(&first) {
        assert_eq!(&std::fs::read(r.path(&format!("out/{n}/report.json"))).unwrap(), before);
    }
}

#[test]
fn tolerance_env_and_manifest_precedence() {
    let r = Run::new();
    let m =
        r.manifest("t.json", &format!(r#"{{ "domain": "annulus.json", {SMALL}, "tolerances": {{ "mass": 1e-6 }} }}"#));
    assert_eq!(code(&r.exec("measure", &m, &[], &[("ROYDEN_LAB_TOL", "1e-5")])), 0);
    let tol = &r.json("out/t/report.json")["tolerances"];
    assert_eq!(tol["boundary_residual"].as_f64(), Some(1e-5));
    assert_eq!(tol["period"].as_f64(), Some(1e-5));
    assert_eq!(tol["mass"].as_f64(), Some(1e-6));
    for bad in ["2", "abc", "0"] {
        assert_eq!(code(&r.exec("measure", &m, &[], &[("ROYDEN_LAB_TOL", bad)])), 2, "{bad}");
    }
}
