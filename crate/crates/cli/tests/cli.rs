use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn faddeev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faddeev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn solve_into(dir: &Path, m: i32, n: i32) -> PathBuf {
    let out = dir.join(format!("s{m}{n}.json"));
    let o = faddeev(&[
        "solve",
        "--m",
        &m.to_string(),
        "--n",
        &n.to_string(),
        "--c-lead",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_reports_classification() {
    let dir = TempDir::new().unwrap();
    let o = faddeev(&[
        "solve",
        "--m",
        "1",
        "--n",
        "1",
        "--out",
        p(&dir.path().join("a.json")),
    ]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!(line.starts_with("SINGULAR rho0=2.34"), "{line}");

    let o = faddeev(&["solve", "--m", "1", "--n", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("BOUNDED"));

    let file: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(file["format_version"], 1);
    assert_eq!(file["classification"]["kind"], "singular");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&faddeev(&["solve", "--m", "0", "--n", "1"])), 64);
    assert_eq!(code(&faddeev(&["solve", "--n", "1"])), 64);
    assert_eq!(
        code(&faddeev(&[
            "scan", "--m", "1", "--n", "1", "--c-from", "0.5", "--c-to", "2", "--steps", "1"
        ])),
        64
    );
    assert_eq!(code(&faddeev(&["frobnicate"])), 64);
}

#[test]
fn missing_input_exits_66() {
    assert_eq!(
        code(&faddeev(&["charge", "--sol", "/nonexistent/missing.json"])),
        66
    );
    assert_eq!(
        code(&faddeev(&["verify", "--sol", "/nonexistent/missing.json"])),
        66
    );
    assert_eq!(
        code(&faddeev(&[
            "export",
            "--sol",
            "/nonexistent/missing.json",
            "--what",
            "profile"
        ])),
        66
    );
}

#[test]
fn charge_methods() {
    let dir = TempDir::new().unwrap();
    let s11 = solve_into(dir.path(), 1, 1);
    let o = faddeev(&["charge", "--sol", p(&s11), "--method", "closed"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["value"], 1.0);
    assert_eq!(r["expected"], 1);
    assert!(r["tail_correction"].as_f64().unwrap() > 0.0);

    let report = dir.path().join("q.json");
    let o = faddeev(&[
        "charge",
        "--sol",
        p(&s11),
        "--method",
        "grid3d",
        "--grid",
        "256",
        "--eps",
        "1e-3",
        "--out",
        p(&report),
    ]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!((r["value"].as_f64().unwrap() - 1.0).abs() < 0.02);
    assert_eq!(r["discretization"]["rule"], "grid3d");
}

#[test]
fn verify_passes_solutions_and_fails_tampered() {
    let dir = TempDir::new().unwrap();
    let s11 = solve_into(dir.path(), 1, 1);
    let o = faddeev(&["verify", "--sol", p(&s11)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["status"], "PASS");
    assert!(r["residual"]["linf_norm"].as_f64().unwrap() < 1e-4);

    let s12 = solve_into(dir.path(), 1, 2);
    let o = faddeev(&["verify", "--sol", p(&s12)]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let singular = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "singular_boundary")
        .unwrap()
        .clone();
    assert_eq!(singular["status"], "not_applicable");

    // multiply g by (1 + 0.1 sin 5ρ) without touching g'
    let mut file: Value = serde_json::from_str(&std::fs::read_to_string(&s11).unwrap()).unwrap();
    let rho: Vec<f64> = serde_json::from_value(file["samples"]["rho"].clone()).unwrap();
    let g: Vec<f64> = serde_json::from_value(file["samples"]["g"].clone()).unwrap();
    let tampered: Vec<f64> = rho
        .iter()
        .zip(&g)
        .map(|(r, g)| g * (1.0 + 0.1 * (5.0 * r).sin()))
        .collect();
    file["samples"]["g"] = serde_json::to_value(tampered).unwrap();
    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&file).unwrap()).unwrap();
    let o = faddeev(&["verify", "--sol", p(&bad)]);
    assert_eq!(code(&o), 1);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["status"], "FAIL");
    assert!(r["failed_checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c == "residual"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("residual"));
}

#[test]
fn scan_csv_layout() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("scan.csv");
    let o = faddeev(&[
        "scan",
        "--m",
        "1",
        "--n",
        "1",
        "--c-from",
        "0.5",
        "--c-to",
        "2",
        "--steps",
        "8",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c_lead,classification,rho0"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    let c: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(c.windows(2).all(|w| w[1] > w[0]));
    let rho0: Vec<f64> = rows
        .iter()
        .filter(|r| r[1] == "SINGULAR")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert!(!rho0.is_empty());
    assert!(rho0.windows(2).all(|w| w[1] < w[0]), "{rho0:?}");
}

#[test]
fn export_tables() {
    let dir = TempDir::new().unwrap();
    let s11 = solve_into(dir.path(), 1, 1);
    let out = dir.path().join("profile.csv");
    let o = faddeev(&[
        "export",
        "--sol",
        p(&s11),
        "--what",
        "profile",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("rho,g,gp,f\n"));
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!(last[0] < 2.34441);
    assert!(last[1] > 1e2);

    let o = faddeev(&["export", "--sol", p(&s11), "--what", "energy"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("rho,e\n"));

    assert_eq!(
        code(&faddeev(&["export", "--sol", p(&s11), "--what", "bogus"])),
        64
    );
}

#[test]
fn reruns_are_identical_and_manifest_is_written() {
    let dir = TempDir::new().unwrap();
    let s11 = solve_into(dir.path(), 1, 1);
    let run = |tag: &str| {
        let manifest = dir.path().join(format!("m-{tag}.json"));
        let o = faddeev(&[
            "export",
            "--sol",
            p(&s11),
            "--what",
            "integrand",
            "--manifest",
            p(&manifest),
        ]);
        assert_eq!(code(&o), 0);
        (stdout(&o), manifest)
    };
    let (a, ma) = run("a");
    let (b, _) = run("b");
    assert_eq!(a, b);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(ma).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "export");
    assert_eq!(m["exit_status"], 0);
    assert_eq!(m["provenance"]["config_hash"].as_str().unwrap().len(), 64);

    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    for out in [&first, &second] {
        faddeev(&["solve", "--m", "1", "--n", "1", "--out", p(out)]);
    }
    let strip = |path: &Path| {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("provenance");
        v
    };
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn manifest_is_emitted_on_usage_errors() {
    let dir = TempDir::new().unwrap();
    let manifest = dir.path().join("m.json");
    let o = faddeev(&["solve", "--m", "0", "--n", "1", "--manifest", p(&manifest)]);
    assert_eq!(code(&o), 64);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["exit_status"], 64);
    assert!(m["diagnostic"].as_str().is_some());
}
