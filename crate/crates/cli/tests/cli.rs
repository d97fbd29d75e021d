use std::path::Path;
use std::process::{Command, Output};

fn loewner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner"))
        .args(args)
        .env_remove("LOEWNER_LOG_LEVEL")
        .output()
        .expect("spawn loewner")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = loewner(&["validate", "--chain", "annulus", "--tmax", "3", "--seed", "7", "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ja = std::fs::read(&a).unwrap();
    assert_eq!(ja, std::fs::read(&b).unwrap());

    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["verdict"], "pass");
    for c in v["checks"].as_array().unwrap() {
        for key in ["check", "samples", "max_residual", "tolerance", "verdict"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn failing_chain_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = loewner(&["validate", "--chain", "scaled-annulus", "--no-evolution", "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&loewner(&["validate", "--chain", "torus"])), 2);
    assert_eq!(code(&loewner(&["eval", "--chain", "annulus"])), 2);
    assert_eq!(code(&loewner(&["frobnicate"])), 2);
    assert_eq!(code(&loewner(&["embed", "--center", "0", "--rin", "2", "--rout", "1"])), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_loewner"))
        .args(["approximant"])
        .env("LOEWNER_LOG_LEVEL", "verbose")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"chain": "annulus", "colour": "blue"}"#).unwrap();
    assert_eq!(code(&loewner(&["validate", "--config", p(&cfg)])), 2);
}

#[test]
fn eval_writes_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dump.csv");
    let o = loewner(&["eval", "--chain", "gen-annulus:n=2", "--t", "1", "--samples", "100", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "z1_re,z1_im,z2_re,z2_im,f1_re,f1_im,f2_re,f2_im");
    assert_eq!(lines.count(), 100);
}

#[test]
fn embed_writes_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.json");
    let o = loewner(&["embed", "--center", "-1", "--rin", "0.4559", "--rout", "2.1933", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let beta = v["beta"].as_array().unwrap();
    assert!(beta.len() > 2);
    assert_eq!(beta[0]["beta"].as_f64(), Some(0.0));
    let b: Vec<f64> = beta.iter().map(|e| e["beta"].as_f64().unwrap()).collect();
    assert!(b.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn lift_seam_reports_deck_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lift.csv");
    let o = loewner(&["lift", "--chain", "annulus", "--t", "1", "--loop", "seam", "--turns", "-2", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("deck index: [-2]"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("u,w1_re,w1_im,c1_re,c1_im"));
    assert!(text.lines().count() > 256);
}

#[test]
fn approximant_errors_decrease() {
    let o = loewner(&["approximant", "--terms", "8"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let errs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 8);
    assert!(errs.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn report_diff_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pass = dir.path().join("pass.json");
    let fail = dir.path().join("fail.json");
    let junk = dir.path().join("junk.json");
    loewner(&["validate", "--chain", "annulus", "--no-evolution", "--tmax", "1", "--out", p(&pass)]);
    loewner(&["validate", "--chain", "scaled-annulus", "--no-evolution", "--tmax", "1", "--out", p(&fail)]);
    std::fs::write(&junk, "{}").unwrap();

    assert_eq!(code(&loewner(&["report-diff", p(&pass), p(&pass)])), 0);
    assert_eq!(code(&loewner(&["report-diff", p(&pass), p(&fail)])), 1);
    assert_eq!(code(&loewner(&["report-diff", p(&pass), p(&junk)])), 2);
    assert_eq!(code(&loewner(&["report-diff", p(&pass), "/nonexistent/x.json"])), 2);
}
