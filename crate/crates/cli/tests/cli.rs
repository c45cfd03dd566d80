use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use slag_core::domain::DomainDescriptor;
use slag_core::grid::RadialGrid;
use slag_core::solver::read_field;
use slag_core::Vec2;

const DISKS: &str = r#"
[source]
kind = "disk"
a = 1.0
anchor = [0.3, -0.2]

[target]
kind = "disk"
a = 2.0
"#;

const ELLIPSES: &str = r#"
[source]
kind = "ellipse"
a = 1.0
b = 0.7

[target]
kind = "ellipse"
a = 1.3
b = 0.6
rotation = 0.5235987755982988

[grid]
radial = 48
angular = 64
"#;

const SQUARE: &str = r#"
[source]
kind = "polygon"
vertices = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]

[target]
kind = "ellipse"
a = 1.4
b = 0.9
"#;

const PENTAGON: &str = r#"
[source]
kind = "polygon"
vertices = [[1.0, 0.0], [0.309017, 0.951057], [-0.809017, 0.587785], [-0.809017, -0.587785], [0.309017, -0.951057]]

[target]
kind = "disk"
a = 1.0

[output]
samples = 21
"#;

fn run(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_slagbvp"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_disks_writes_fields_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve", DISKS, dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let summary = json(out.join("summary.json"));
    let c = summary["c"].as_f64().unwrap();
    assert!((c - 2.0 * 2f64.atan()).abs() <= 2e-3, "c = {c}");
    assert_eq!(summary["method"], "direct");
    assert_eq!(summary["n_rho"], 64);

    let dom = DomainDescriptor::disk(1.0).build().unwrap();
    let grid = RadialGrid::build(dom.defining_function(), Vec2::new(0.3, -0.2), 64, 64).unwrap();
    let u = read_field(&out.join("fields_u.csv"), &grid).unwrap();
    assert!(grid.integrate(&u).abs() < 1e-10);
    let l1 = read_field(&out.join("fields_lambda1.csv"), &grid).unwrap();
    let l2 = read_field(&out.join("fields_lambda2.csv"), &grid).unwrap();
    assert!(l1.iter().zip(&l2).all(|(a, b)| a <= b));
    for name in ["grad1", "grad2"] {
        let text = fs::read_to_string(out.join(format!("fields_{name}.csv"))).unwrap();
        assert_eq!(text.lines().count(), grid.len() + 1);
    }
}

#[test]
fn summary_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(code(&run("solve", DISKS, a.path(), &["--grid", "24"])), 0);
    assert_eq!(
        code(&run(
            "solve",
            DISKS,
            b.path(),
            &["--grid", "24", "--sequential"]
        )),
        0
    );
    let read = |d: &Path| fs::read(d.join("out/summary.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn verify_passes_on_disks() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("verify", DISKS, dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = json(dir.path().join("out/diagnostics.json"));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 15);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn dual_defect_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("dual", ELLIPSES, dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d = json(dir.path().join("out/dual.json"));
    assert!(d["defect"].as_f64().unwrap().abs() <= 5e-3, "{d}");
}

#[test]
fn continuation_writes_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("continuation", SQUARE, dir.path(), &["--grid", "24"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let path = fs::read_to_string(out.join("tpath.csv")).unwrap();
    let rows: Vec<&str> = path.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.last().unwrap().starts_with("1.0000000000000000e0,"));
    assert_eq!(json(out.join("summary.json"))["continuation_steps"], 9);
}

#[test]
fn build_domain_tabulates_both_functions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("build-domain", PENTAGON, dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let text = fs::read_to_string(out.join("h_source.csv")).unwrap();
    assert_eq!(text.lines().count(), 21 * 21 + 1);
    let report = json(out.join("domains.json"));
    assert_eq!(report["source"]["kind"], "blended");
    assert!(report["source"]["theta"].as_f64().unwrap() > 0.0);
    assert_eq!(report["target"]["kind"], "analytic");
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        "solve",
        &DISKS.replace("a = 2.0", "a = 2.0\nradius = 3.0"),
        dir.path(),
        &[],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius"));
    assert_eq!(code(&run("solve", DISKS, dir.path(), &["--grid", "4"])), 2);
    let missing = Command::new(env!("CARGO_BIN_EXE_slagbvp"))
        .args(["solve", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(code(&missing), 2);
}

#[test]
fn geometry_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        "solve",
        &DISKS.replace("[0.3, -0.2]", "[3.0, 0.0]"),
        dir.path(),
        &[],
    );
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn solver_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{ELLIPSES}\n[solver]\nmax_iter = 1\n");
    let o = run("solve", &cfg, dir.path(), &["--tol", "1e-14"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}
