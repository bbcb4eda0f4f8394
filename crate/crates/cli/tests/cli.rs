use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cone-cf"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_golden_file() {
    let file = data("golden_scalar.json");
    let o = bin()
        .arg("eval")
        .arg(&file)
        .args(["--depth", "40"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("40,0.6180339887"), "{last}");
    assert_eq!(text.lines().next().unwrap(), "k,m11");
}

#[test]
fn eval_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = bin()
        .arg("eval")
        .arg(data("golden_scalar.json"))
        .args(["--depth", "10", "--format", "json", "--trace"])
        .arg(&trace)
        .output()
        .unwrap();
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["convergents"].as_array().unwrap().len(), 10);
    let csv = std::fs::read_to_string(trace).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn equiv_on_general_file() {
    let o = bin()
        .arg("equiv")
        .arg(data("general_rank2.json"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["passed"], true);
    assert!(json["max_rel_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn identities_rank1_and_rank3() {
    assert!(
        run(&["identities", "--rank", "1", "--cases", "100", "--seed", "1"])
            .status
            .success()
    );
    let o = run(&["identities", "--rank", "3", "--cases", "200", "--seed", "2"]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["schema"], "cone-cf/1");
    assert_eq!(json["passed"], true);
}

#[test]
fn mc_summary_schema_and_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mc.csv");
    let o = bin()
        .args(["mc", "--rank", "2", "--b", "3", "--a", "3", "--a2", "4"])
        .args(["--trials", "50", "--depth", "80", "--seed", "7", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(json["fraction_converged"].is_number());
    assert!(json.get("median_first_cauchy_k").is_some());
    assert!(json["max_monotonicity_violation"].is_number());
    assert_eq!(json["schema"], "cone-cf/1");
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 50 * 79);
}

#[test]
fn scalar_mc_converges() {
    let o = run(&[
        "mc", "--rank", "1", "--b", "2", "--a", "2", "--a2", "2", "--trials", "100", "--depth",
        "100", "--eps", "1e-6", "--seed", "3",
    ]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["fraction_converged"].as_f64(), Some(1.0));
}

#[test]
fn sample_dump_header() {
    let o = run(&[
        "sample", "--dist", "wishart", "--p", "3", "--rank", "2", "--n", "4", "--seed", "9",
    ]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let h = &json["header"];
    assert_eq!(h["dist"], "wishart");
    assert_eq!(h["r"], 2);
    assert_eq!(h["n"], 4);
    assert!(h["q"].is_null());
    assert_eq!(json["samples"].as_array().unwrap().len(), 4);
    let o = run(&[
        "sample", "--dist", "beta2", "--p", "2", "--q", "3", "--rank", "1", "--n", "3", "--format",
        "csv",
    ]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn usage_errors_exit_2() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["bogus"]), Some(2));
    assert_eq!(code(&["mc", "--rank", "2"]), Some(2));
    assert_eq!(
        code(&["mc", "--rank", "3", "--b", "0.9", "--a", "3", "--a2", "3"]),
        Some(2)
    );
    assert_eq!(
        code(&["mc", "--rank", "2", "--b", "3", "--a", "3", "--a2", "3", "--depth", "3"]),
        Some(2)
    );
    assert_eq!(code(&["identities", "--rank", "5"]), Some(2));
    assert_eq!(
        code(&["sample", "--dist", "beta2", "--p", "2", "--rank", "1", "--n", "1"]),
        Some(2)
    );
    assert_eq!(code(&["eval", "/nonexistent.json"]), Some(2));
    let file = data("golden_scalar.json");
    let o = bin()
        .arg("eval")
        .arg(&file)
        .args(["--depth", "41"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
