use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use weylkit::weyl::{ew_matrix, primitive_root};
use weylkit::CMatrix;

fn weylkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylkit"))
        .args(args)
        .env_remove("WEYLKIT_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn generate_to(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    assert_eq!(weylkit(&full).status.code(), Some(0));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generated_shapes() {
    let pair = json(&weylkit(&["generate", "--kind", "pair", "--p", "3"]));
    assert_eq!(pair["d"], 3);
    assert_eq!(pair["unitaries"].as_array().unwrap().len(), 2);

    let q2 = json(&weylkit(&["generate", "--kind", "brauer", "--p", "3", "--k", "2"]));
    assert_eq!(q2["d"], 9);
    assert_eq!(q2["unitaries"].as_array().unwrap().len(), 5);
}

#[test]
fn weighted_cycle_is_written_verbatim() {
    let out = json(&weylkit(&["generate", "--kind", "ew", "--p", "3"]));
    let y: CMatrix = serde_json::from_value(out["unitaries"][1].clone()).unwrap();
    assert_eq!(y, ew_matrix(3, primitive_root(3)).unwrap());
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let args = ["generate", "--kind", "random", "--p", "5", "--n", "2", "--seed", "17"];
    let (a, b) = (weylkit(&args), weylkit(&args));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(
        a.stdout,
        weylkit(&["generate", "--kind", "random", "--p", "5", "--n", "2", "--seed", "18"]).stdout
    );
}

#[test]
fn usage_and_construction_errors() {
    assert_eq!(
        weylkit(&["generate", "--kind", "pair", "--p", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(weylkit(&["generate", "--kind", "sphere"]).status.code(), Some(2));
    assert_eq!(
        weylkit(&["generate", "--kind", "pair", "--frobnicate"]).status.code(),
        Some(2)
    );
    assert_eq!(
        weylkit(&["generate", "--kind", "triple", "--p", "4"]).status.code(),
        Some(3)
    );
    assert_eq!(
        weylkit(&["generate", "--kind", "brauer", "--p", "3", "--k", "9"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        weylkit(&["certify", "--in", "/nonexistent/system.json"]).status.code(),
        Some(3)
    );
    assert_eq!(weylkit(&["--help"]).status.code(), Some(0));
}

#[test]
fn certify_random_pair() {
    let dir = TempDir::new().unwrap();
    let sys = generate_to(
        &dir,
        "r.json",
        &["--kind", "random", "--p", "3", "--n", "2", "--seed", "8"],
    );
    let out = weylkit(&["certify", "--in", s(&sys)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["pass"], true);
    let rec = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "canonical form reconstruction")
        .unwrap();
    assert!(rec["value"].as_f64().unwrap() <= 1e-8 * 6.0);
    assert_eq!(report["commutant_dim"], 4);
}

#[test]
fn certify_clock_and_shift() {
    let dir = TempDir::new().unwrap();
    let sys = generate_to(&dir, "pair.json", &["--kind", "pair", "--p", "5"]);
    let out = weylkit(&["certify", "--in", s(&sys)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["irreducible"], true);
    assert_eq!(report["algebra_dim"], 25);
}

#[test]
fn certify_weighted_cycle_fails_the_order_check() {
    let dir = TempDir::new().unwrap();
    let sys = generate_to(&dir, "ew.json", &["--kind", "ew", "--p", "3"]);
    let out = weylkit(&["certify", "--in", s(&sys), "--format", "text"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL  order p"));
    assert!(text.contains("result: fail"));
}

#[test]
fn passing_and_failing_checks_match_the_exit_code() {
    let dir = TempDir::new().unwrap();
    for (name, kind) in [
        ("a", "pair"),
        ("b", "triple"),
        ("c", "counterexample"),
        ("d", "ew"),
        ("e", "brauer"),
    ] {
        let sys = generate_to(&dir, name, &["--kind", kind, "--p", "3"]);
        let out = weylkit(&["certify", "--in", s(&sys)]);
        let report = json(&out);
        let required_failure = report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .any(|c| c["required"] == true && c["outcome"] == "fail");
        assert_eq!(out.status.code(), Some(if required_failure { 1 } else { 0 }), "{kind}");
        assert_eq!(report["pass"], !required_failure);
    }
}

#[test]
fn tolerance_comes_from_flag_then_environment() {
    let dir = TempDir::new().unwrap();
    let sys = generate_to(&dir, "pair.json", &["--kind", "pair", "--p", "3"]);
    let threshold = |out: &Output| json(out)["relations"]["tolerance"].as_f64().unwrap();

    assert!((threshold(&weylkit(&["certify", "--in", s(&sys)])) - 3e-9).abs() < 1e-20);
    let env = Command::new(env!("CARGO_BIN_EXE_weylkit"))
        .args(["certify", "--in", s(&sys)])
        .env("WEYLKIT_TOL", "1e-6")
        .output()
        .unwrap();
    assert!((threshold(&env) - 3e-6).abs() < 1e-17);
    let both = Command::new(env!("CARGO_BIN_EXE_weylkit"))
        .args(["certify", "--in", s(&sys), "--tol", "1e-12"])
        .env("WEYLKIT_TOL", "1e-6")
        .output()
        .unwrap();
    assert!((threshold(&both) - 3e-12).abs() < 1e-23);
    let bad = Command::new(env!("CARGO_BIN_EXE_weylkit"))
        .args(["certify", "--in", s(&sys)])
        .env("WEYLKIT_TOL", "loose")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn output_file_replaces_atomically() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("sys.json");
    std::fs::write(&target, "stale").unwrap();
    let out = weylkit(&["generate", "--kind", "pair", "--p", "3", "--out", s(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(written["p"], 3);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn interpolation_exit_codes() {
    let dir = TempDir::new().unwrap();
    let pair = generate_to(&dir, "pair.json", &["--kind", "pair", "--p", "3"]);
    let triple = generate_to(&dir, "t.json", &["--kind", "triple", "--p", "3"]);
    let bad = generate_to(&dir, "c.json", &["--kind", "counterexample", "--p", "3"]);

    let own = weylkit(&["interpolate", "--in", s(&pair)]);
    assert_eq!(own.status.code(), Some(0));
    let report = json(&own);
    assert_eq!(report["status"], "feasible");
    let witness: CMatrix = serde_json::from_value(report["witness"].clone()).unwrap();
    let identity = weylkit::choi::ChoiMatrix::identity_map(3).mat;
    assert!(weylkit::feasibility::normalized_distance(&witness, &identity) <= 1e-5);

    let counter = weylkit(&["interpolate", "--in", s(&triple), "--in", s(&bad)]);
    assert_eq!(counter.status.code(), Some(1));
    assert_eq!(json(&counter)["status"], "infeasible_evidence");

    let short = weylkit(&["interpolate", "--in", s(&triple), "--max-iters", "5"]);
    assert_eq!(short.status.code(), Some(4));
    assert_eq!(json(&short)["status"], "undetermined");

    assert_eq!(weylkit(&["interpolate"]).status.code(), Some(2));
    assert_eq!(
        weylkit(&["interpolate", "--in", s(&pair), "--in", s(&triple)])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn interpolation_accepts_bare_matrix_lists() {
    let dir = TempDir::new().unwrap();
    let pair = generate_to(&dir, "pair.json", &["--kind", "pair", "--p", "3"]);
    let zeros = dir.path().join("zeros.json");
    let list = vec![CMatrix::zeros(1, 1), CMatrix::zeros(1, 1)];
    std::fs::write(&zeros, weylkit::json::to_json_string(&list).unwrap()).unwrap();
    let out = weylkit(&["interpolate", "--in", s(&pair), "--in", s(&zeros)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["out_dim"], 1);
}

#[test]
fn rigidity_report() {
    let out = weylkit(&["interpolate", "--rigidity", "--p", "3", "--ell", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["witness_found"], true);
    let norms = report["offdiag_norms"].as_array().unwrap();
    assert!(!norms.is_empty());
    assert!(norms.iter().all(|x| x.as_f64().unwrap() <= 1e-6));
    assert_eq!(
        weylkit(&["interpolate", "--rigidity", "--in", "x.json"]).status.code(),
        Some(2)
    );
}
