//! End-to-end runs of the command-line binary: exit codes, report schema,
//! and byte-stable deterministic output.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_morita-ssum"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

#[test]
fn validate_passes_with_exit_zero() {
    let out = run(&["hopf", "validate", "f_s3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["config"]["scalar"], "exact");
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn unknown_input_is_usage_error() {
    let out = run(&["hopf", "validate", "no_such_thing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_skeletal_fails_naming_pentagon() {
    // flip a sign in the golden-ratio associator
    let dir = tempdir();
    let fib = run(&["skeletal", "validate", "fibonacci", "--scalar", "complex"]);
    assert_eq!(fib.status.code(), Some(0));
    let path = dir.join("corrupted.json");
    let mut data: serde_json::Value = serde_json::from_str(include_str!(
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/fibonacci.json")
    ))
    .unwrap();
    for entry in data["f"].as_array_mut().unwrap() {
        let key: Vec<u64> =
            entry["key"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        if key == [1, 1, 1, 1, 1, 1, 0, 0, 0, 0] {
            let re = entry["val"]["re"].as_f64().unwrap();
            entry["val"]["re"] = serde_json::json!(-re);
        }
    }
    std::fs::write(&path, serde_json::to_string(&data).unwrap()).unwrap();
    let out = run(&["skeletal", "validate", path.to_str().unwrap(), "--scalar", "complex"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let pentagon = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "pentagon")
        .unwrap();
    assert_eq!(pentagon["pass"], false);
}

#[test]
fn invariant_value_and_determinism() {
    let args = [
        "invariant",
        "fibonacci",
        "s3_5tet",
        "--scalar",
        "complex",
        "--deterministic",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b), "deterministic runs are byte-identical");
    assert!(stdout(&a).contains("0.2763932022500211"));
}

#[test]
fn exact_pointed_invariant() {
    let out = run(&["invariant", "vec_z2", "t3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"q\": \"4/1\""), "{}", stdout(&out));
}

#[test]
fn oracle_command() {
    let out = run(&["oracle", "flat-bundles", "zn:3", "s3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1/2"));
}

#[test]
fn category_and_regular_commands() {
    let out = run(&["category", "dims", "k_s3", "--scalar", "complex"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["frobenius", "regular", "f_z2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn frobenius_check_round_trip() {
    let dir = tempdir();
    let path = dir.join("regular.json");
    let out = bin()
        .args(["frobenius", "regular", "f_z2", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["frobenius", "check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["values"]["product"]["q"], "2/1");
}

#[test]
fn morita_build_then_bicolored_invariant() {
    let dir = tempdir();
    let ctx = dir.join("ctx.json");
    let out = bin()
        .args([
            "morita", "build", "f_z2", "regular", "--scalar", "complex", "--out",
            ctx.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "invariant",
        ctx.to_str().unwrap(),
        "s3_5tet",
        "--bicolored",
        "--labels",
        "AABAB",
        "--scalar",
        "complex",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let re = report["values"]["invariant"]["re"].as_f64().unwrap();
    assert!((re - 0.5).abs() < 1e-9);
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("morita-ssum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn fixtures_env_var_resolution() {
    let dir = tempdir();
    // a fixture directory carrying a renamed copy of the golden-ratio data
    std::fs::copy(
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/fibonacci.json"),
        dir.join("golden.json"),
    )
    .unwrap();
    let out = bin()
        .args(["skeletal", "validate", "golden", "--scalar", "complex"])
        .env("MORITA_SSUM_FIXTURES", dir.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fixture_files_load_by_path() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    let out = run(&["hopf", "validate", &format!("{root}/k_s3.json")]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "invariant",
        &format!("{root}/rep_s3.json"),
        &format!("{root}/lens_3_1.json"),
        "--scalar",
        "complex",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
