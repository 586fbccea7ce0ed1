use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn omedian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omedian"))
        .args(args)
        .env_remove("OMEDIAN_OUT_DIR")
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_instance(dir: &Path, name: &str, seed: &str) -> String {
    let out = omedian(&["gen", "--customers", "8", "--facilities", "6", "--seed", seed]);
    assert!(out.status.success());
    let path = dir.join(name);
    fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn optimal_bids_for_four() {
    let out = omedian(&["bid", "optimal", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["ratio"], 2.0);
    assert_eq!(v["ratio_exact"], "2");
    assert_eq!(v["bids"], serde_json::json!([2, 4]));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["seed"], 0);
}

#[test]
fn kl_gadget_costs() {
    let out = omedian(&["hardness", "kl", "--l", "3", "--run-algorithm"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["cost_f"], "3");
    assert_eq!(v["cost_g_i"], "5");
    assert_eq!(v["ratio_small"], "5/3");
    assert_eq!(v["ratio_large"], "5/3");
    assert_eq!(v["algorithm"]["ratio"], "5/3");
    assert_eq!(v["algorithm"]["within_target"], true);
}

#[test]
fn doubling_on_a_range_passes() {
    let out = omedian(&["bid", "det", "--n", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["bound"], "4");
    assert_eq!(v["bids"], serde_json::json!(["1", "2", "4", "8", "16", "32", "64", "100"]));
}

#[test]
fn universe_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    fs::write(&path, r#"[1, "3/2", 7, 20]"#).unwrap();
    let out = omedian(&["bid", "det", "--universe", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["universe_size"], 4);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(omedian(&["bid", "det"]).status.code(), Some(2));
    assert_eq!(omedian(&["bid", "det", "--n", "5", "--universe", "u.json"]).status.code(), Some(2));
    assert_eq!(omedian(&["hardness", "adv", "--m", "9"]).status.code(), Some(2));
    assert_eq!(omedian(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"customers\": [").unwrap();
    let out = omedian(&["solve", "--instance", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));

    let missing = dir.path().join("missing.json");
    assert_eq!(omedian(&["solve", "--instance", missing.to_str().unwrap()]).status.code(), Some(2));

    let neg = dir.path().join("neg.json");
    fs::write(&neg, "[1, -2]").unwrap();
    assert_eq!(omedian(&["bid", "det", "--universe", neg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn non_metric_cost_chain_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("skewed.json");
    // d(y, f) = 100 while f reaches y through x and g at total length 3
    fs::write(
        &path,
        r#"{"customers": ["x", "y"], "facilities": ["f", "g"], "dist": [[1, 1], [100, 1]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let out = omedian(&["oblivious", "build", "--instance", p, "--mode", "cost"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    let out = omedian(&["oblivious", "build", "--instance", p, "--mode", "cost", "--relaxed"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_ne!(json_of(&out)["lambda_star"], Value::Null);
}

#[test]
fn generated_instance_round_trips_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "inst.json", "4");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(doc["meta"]["config"]["seed"], 4);

    let out = omedian(&["solve", "--instance", &inst, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# omedian "));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next(), Some("k,size,cost"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn out_dir_receives_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "inst.json", "1");
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_omedian"))
        .args(["oblivious", "build", "--instance", &inst, "--mode", "size"])
        .env("OMEDIAN_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("chain_size.json")).unwrap()).unwrap();
    assert_eq!(summary["mode"], "size");
    assert_eq!(summary["config"]["command"]["oblivious"]["build"]["mode"], "size");
    let csv = fs::read_to_string(out_dir.join("chain_size.csv")).unwrap();
    assert_eq!(csv.lines().nth(2), Some("k,size,cost,opt,size_ratio"));

    let out = omedian(&["hardness", "adv", "--m", "2", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let gadget = out_dir.join("adversarial_m2.instance.json");
    let solved = omedian(&["solve", "--instance", gadget.to_str().unwrap()]);
    assert_eq!(solved.status.code(), Some(0), "{}", String::from_utf8_lossy(&solved.stderr));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["bid", "rand", "--n", "40", "--trials", "5000", "--seed", "9", "--format", "csv"];
    let a = omedian(&args);
    let b = omedian(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = omedian(&["bid", "rand", "--n", "40", "--trials", "5000", "--seed", "10", "--format", "csv"]);
    assert_ne!(a.stdout, c.stdout);
}
