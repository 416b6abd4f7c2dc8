use std::path::PathBuf;
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn reesolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reesolve")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn ord_at_the_origin() {
    let o = reesolve(&["ord", problem("cusp.pair").to_str().unwrap(), "--point", "0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
    let o = reesolve(&["ord", problem("cusp-curve.pair").to_str().unwrap(), "--point", "0,0"]);
    assert_eq!(stdout(&o), "2\n");
    let o = reesolve(&["ord", problem("e8.pair").to_str().unwrap(), "--point", "0,0"]);
    assert_eq!(stdout(&o), "3/2\n");
}

#[test]
fn resolve_the_cusp() {
    let o = reesolve(&["resolve", problem("cusp.pair").to_str().unwrap(), "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "resolved");
    let steps = v["steps"].as_array().unwrap();
    let blowups: Vec<_> = steps.iter().filter(|s| s["kind"] == "blowup").collect();
    assert_eq!(blowups.len(), 1);
    assert_eq!(blowups[0]["t"]["word"], "1");
    assert_eq!(blowups[0]["t"]["n"], 0);
    assert_eq!(blowups[0]["center"], serde_json::json!(["x", "y"]));
}

#[test]
fn check_equiv_reports_identical_traces() {
    let o = reesolve(&[
        "check-equiv",
        problem("cusp.pair").to_str().unwrap(),
        problem("cusp-squared.pair").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "EQUIVALENT: traces identical (1 step)\n");
    let o = reesolve(&["check-equiv", problem("cusp.pair").to_str().unwrap(), problem("cusp-curve.pair").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT EQUIVALENT"));
}

#[test]
fn parse_errors_exit_with_two_and_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_temp(&dir, "bad.pair", "vars x y;\npair gens: x^2 + q; b: 2;\n");
    let o = reesolve(&["ord", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:"), "{}", String::from_utf8_lossy(&o.stderr));
    let o = reesolve(&["ord", "/nonexistent/file.pair"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn limits_exit_with_three() {
    let o = reesolve(&["resolve", problem("node.pair").to_str().unwrap(), "--max-steps", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "limit-exceeded");
}

#[test]
fn unsupported_geometry_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_temp(&dir, "two-cusps.pair", "vars x y;\npair gens: (x^2+y^3)*(x^3+y^2); b: 2;\n");
    let o = reesolve(&["resolve", &f]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "unsupported-geometry");
}

#[test]
fn dump_reparses_to_the_same_text() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["cusp.pair", "mixed.alg", "whitney.pair"] {
        let first = stdout(&reesolve(&["--dump", "ord", problem(name).to_str().unwrap()]));
        let f = write_temp(&dir, name, &first);
        let second = stdout(&reesolve(&["--dump", "ord", &f]));
        assert_eq!(first, second);
    }
}

#[test]
fn transform_prints_every_chart() {
    let o = reesolve(&["transform", problem("cusp.pair").to_str().unwrap(), "--center", "x,y"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("# chart 0.0") && out.contains("# chart 0.1"), "{out}");
    assert!(out.contains("(x^2 + y, 2)"), "{out}");
    let o = reesolve(&["transform", problem("cusp.pair").to_str().unwrap(), "--center", "y"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sing_and_diffclose() {
    let out = stdout(&reesolve(&["sing", problem("cusp.pair").to_str().unwrap()]));
    assert!(out.contains("grid: 1 of"), "{out}");
    assert!(out.contains("empty: no"));
    let out = stdout(&reesolve(&["diffclose", problem("cusp.pair").to_str().unwrap()]));
    assert_eq!(out, "(y^3 + x^2, 2)\n(y^3 + x^2, 1)\n(2*x, 1)\n(3*y^2, 1)\n");
}

#[test]
fn candidates_file_adds_points() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_temp(&dir, "pts", "# two points\n1/2, -1\n(3, 0)\n");
    let out = stdout(&reesolve(&["ord", problem("cusp-curve.pair").to_str().unwrap(), "--candidates", &f]));
    assert_eq!(out, "(1/2, -1): 0\n(3, 0): 0\n");
}
