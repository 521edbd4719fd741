use std::process::{Command, Output};

use serde_json::Value;

fn freelat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freelat")).args(args).output().unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = freelat(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn freeness_of_a_height_one_point() {
    let v = json_ok(&["freeness", "--point", "1:0:0"]);
    assert_eq!(v["freeness"], 1.0);
    assert_eq!(v["logH"], 0.0);
    assert_eq!(v["degenerate"], true);
}

#[test]
fn pair_report() {
    let v = json_ok(&["pair", "--p1", "1:0:0", "--p2", "1:5:0", "--C", "3", "--delta", "0.4"]);
    assert_eq!(v["W"], 5);
    assert!((v["c"].as_f64().unwrap() - 26f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["in_S"], false);
    assert_eq!(v["dist_sq"], serde_json::json!([25, 26]));
    let v = json_ok(&["pair", "--p1", "1:2:2", "--p2", "2:1:2"]);
    assert_eq!(v["in_S"], true);
}

#[test]
fn euler_and_density() {
    let v = json_ok(&["euler", "--n", "2", "--cutoff", "100"]);
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo < hi && hi < 0.76 && lo > 0.70);
    let v = json_ok(&["density", "--n", "2", "--p", "5", "--bound", "200"]);
    assert!(v["relative_error"].as_f64().unwrap() < 0.2);
}

#[test]
fn slopes_from_inline_and_file_gram() {
    let gram = r#"{"rank":2,"gram":[[2,1],[1,1],[1,1],[2,1]]}"#;
    let v = json_ok(&["slopes", "--gram", gram]);
    let mu: Vec<f64> = v["slopes"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((mu[0] + 0.25 * 3f64.ln()).abs() < 1e-12 && (mu[1] - mu[0]).abs() < 1e-12);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, gram).unwrap();
    let w = json_ok(&["slopes", "--gram", &format!("@{}", path.display())]);
    assert_eq!(v, w);
}

#[test]
fn exit_codes() {
    let bad_point = freelat(&["freeness", "--point", "0:0:0"]);
    assert_eq!(bad_point.status.code(), Some(2));
    assert!(bad_point.stdout.is_empty());
    let bad_delta = freelat(&["pair", "--p1", "1:0", "--p2", "0:1", "--delta", "0.7"]);
    assert_eq!(bad_delta.status.code(), Some(2));
    let bad_gram = freelat(&["slopes", "--gram", r#"{"rank":2,"gram":[[1,1],[2,1],[0,1],[1,1]]}"#]);
    assert_eq!(bad_gram.status.code(), Some(2));
    let missing = freelat(&["slopes", "--gram", "@/nonexistent/gram.json"]);
    assert_eq!(missing.status.code(), Some(1));
    let budget = freelat(&["survey", "--bmin", "256", "--bmax", "4096", "--max-points", "200"]);
    assert_eq!(budget.status.code(), Some(3));
    // the bounds that fit are still reported
    let partial: Value = serde_json::from_slice(&budget.stdout).unwrap();
    assert!(!partial.as_array().unwrap().is_empty());
    let capped = Command::new(env!("CARGO_BIN_EXE_freelat"))
        .args(["freeness", "--point", "1:2:3:4:5:6:7"])
        .env("FREELAT_MAX_VECTORS", "1")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn survey_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, format: &str| {
        let out = dir.path().join(format!("{threads}.{format}"));
        let status = freelat(&[
            "survey", "--n", "2", "--C", "3", "--delta", "0.4", "--bmin", "1024", "--bmax", "65536",
            "--threads", threads, "--format", format, "--out", out.to_str().unwrap(),
        ]);
        assert!(status.status.success());
        assert!(status.stdout.is_empty());
        std::fs::read(out).unwrap()
    };
    for format in ["csv", "json"] {
        assert_eq!(run("1", format), run("8", format));
    }
    let csv = String::from_utf8(run("1", "csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7);
    assert!(csv.starts_with("B,n,C,delta,pairs_total,pairs_in_S,ratio_BlogB,min_pair_freeness"));
}

#[test]
fn survey_from_config_with_floor_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n":2,"C":3,"delta":0.4,"bounds":[1024,2048,4096],"metricNote":"chordal"}"#).unwrap();
    let floor = dir.path().join("floor.json");
    let v = json_ok(&["survey", "--config", cfg.to_str().unwrap(), "--floor-report", floor.to_str().unwrap()]);
    assert_eq!(v.as_array().unwrap().len(), 3);
    let report: Value = serde_json::from_slice(&std::fs::read(floor).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    std::fs::write(&cfg, r#"{"n":2,"C":3,"delta":0.4,"bounds":[1024],"metricNote":"fubini"}"#).unwrap();
    assert_eq!(freelat(&["survey", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
