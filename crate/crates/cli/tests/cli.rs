use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn corrsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrsim")).args(args).output().expect("binary runs")
}

fn corrsim_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrsim")).args(args).env(key, value).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error is JSON")
}

#[test]
fn erase_bell_totals_two_bits() {
    let r = json(&corrsim(&["erase-bell"]));
    let totals = &r["body"]["result"]["totals"];
    assert!((totals["log_n"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((totals["entropy_exchange"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(r["body"]["schema"], "corrsim-report/1");
    assert_eq!(r["body"]["units"], "bits");
}

#[test]
fn entropy_of_bell_pair() {
    let r = json(&corrsim(&["entropy", "--state", "bell", "--cut", "1|1"]));
    let i = r["body"]["result"]["mutual_information"].as_f64().unwrap();
    assert!((i - 2.0).abs() < 1e-9);
    assert_eq!(r["body"]["config"]["state"], "bell");
    assert_eq!(r["body"]["config"]["cut"], "1|1");
}

#[test]
fn ssa_scan_has_no_violations() {
    let r = json(&corrsim(&["ssa-scan", "--count", "1000", "--dims", "2,2,2", "--seed", "42"]));
    assert_eq!(r["body"]["result"]["violations"], 0);
    assert_eq!(r["body"]["seed"], 42);
}

#[test]
fn report_body_is_deterministic_across_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &Path| {
        vec!["decorrelate".to_string(), "--n-unitaries".into(), "4,8".into(), "--seed".into(), "5".into(), "--out".into(), p.display().to_string()]
    };
    for p in [&a, &b] {
        let out = Command::new(env!("CARGO_BIN_EXE_corrsim")).args(args(p)).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
    let (ra, rb) = (read(&a), read(&b));
    assert_eq!(serde_json::to_string(&ra["body"]).unwrap(), serde_json::to_string(&rb["body"]).unwrap());
    assert!(ra["timestamp"].is_u64());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().filter_map(|e| e.ok()).filter(|e| e.file_name().to_string_lossy().ends_with(".tmp")).collect();
    assert!(leftovers.is_empty());
}

#[test]
fn decorrelate_csv_rows() {
    let out = corrsim(&["decorrelate", "--n-unitaries", "2,4", "--trials", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "seed,param,achieved_eps,log_n,shannon,entropy_exchange");
    assert_eq!(lines.count(), 6);
}

#[test]
fn unknown_state_exits_3() {
    let out = corrsim(&["entropy", "--state", "nope"]);
    assert_eq!(out.status.code(), Some(3));
    let e = stderr_json(&out);
    assert_eq!(e["error"]["kind"], "unknown_state");
    assert!(e["error"]["message"].as_str().unwrap().contains("bell_dephased"));
}

#[test]
fn dimension_cap_exits_4() {
    let out = corrsim(&["typicality", "--state", "werner:0.5", "--n", "8"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"]["kind"], "dimension_cap");
    let out = corrsim_env(&["typicality", "--state", "werner:0.5", "--n", "2"], "CORRSIM_DIM_CAP", "8");
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn precondition_errors_exit_2() {
    let out = corrsim(&["disentangle", "--state", "bell_dephased"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "precondition");
    let out = corrsim(&["entropy", "--state", "ghz3", "--cut", "1|1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dry_run_diagnostics() {
    let diags = |out: &Output| json(out)["body"]["result"]["diagnostics"].as_array().unwrap().clone();
    assert!(diags(&corrsim(&["entropy", "--state", "bell", "--dry-run"])).is_empty());

    let d = diags(&corrsim(&["ssa-scan", "--dims", "64,64,64", "--dry-run"]));
    assert_eq!(d.len(), 1);
    assert!(d[0]["message"].as_str().unwrap().contains("dimension cap 16384"));

    let d = diags(&corrsim(&["entropy", "--state", "nope", "--dry-run"]));
    assert_eq!(d.len(), 1);
    assert!(d[0]["message"].as_str().unwrap().contains("werner:p"));
}

#[test]
fn state_file_with_dims() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    let h = 0.5;
    let entries: Vec<[f64; 2]> = (0..16).map(|k| if k == 0 || k == 15 { [h, 0.0] } else { [0.0, 0.0] }).collect();
    let lit = serde_json::json!({ "rows": 4, "cols": 4, "entries": entries, "dims": [2, 2] });
    std::fs::write(&path, lit.to_string()).unwrap();
    let r = json(&corrsim(&["entropy", "--state-file", path.to_str().unwrap()]));
    assert!((r["body"]["result"]["mutual_information"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn two_step_with_channel_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("channel.json");
    std::fs::write(
        &path,
        r#"{"locality":"A_LUR","ensemble":[
            {"p":0.5,"uA":{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}},
            {"p":0.5,"uA":{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[-1,0]]}}]}"#,
    )
    .unwrap();
    let r = json(&corrsim(&["two-step", "--state", "bell", "--channel-file", path.to_str().unwrap()]));
    let result = &r["body"]["result"];
    assert!((result["one_shot"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(result["gap_nonnegative"].as_bool().unwrap());
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["disentangle", "--state", "schmidt:0.6,0.3,0.1"],
        &["classical", "--state", "haar:2,3:4"],
        &["two-step", "--state", "haar:2,2:9"],
        &["multiparty"],
        &["conjecture-scan", "--count", "20"],
        &["chernoff", "--dim", "2", "--n-samples", "32", "--eps", "0.3", "--trials", "50", "--seed", "3"],
        &["typicality", "--n", "300"],
        &["gentle"],
        &["decorrelate", "--n", "2", "--n-unitaries", "16", "--debug", "--eps-cut", "0.1"],
    ];
    for args in cases {
        let r = json(&corrsim(args));
        assert_eq!(r["body"]["command"], args[0]);
    }
}

#[test]
fn out_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = corrsim(&["chernoff", "--dim", "2", "--trials", "20", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(r["body"]["result"]["trials"]["ok"].as_bool().unwrap());
}
