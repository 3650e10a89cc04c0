use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coop-bandit"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ok(output: Output) -> String {
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    String::from_utf8(output.stdout).unwrap()
}

#[test]
fn run_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(bin()
            .args(["run", "--runs", "8", "--horizon", "500", "--seed", "3", "--format", "csv", "--out"])
            .arg(&out)
            .arg("--config")
            .arg(configs().join("pa_fixed_2x2.json"))
            .output()
            .unwrap());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "step,mean_regret,stderr,label");
    assert_eq!(text.lines().count(), 501);
}

#[test]
fn run_json_to_stdout() {
    let stdout = ok(bin()
        .args(["run", "--runs", "2", "--horizon", "50", "--format", "json", "--config"])
        .arg(configs().join("pa_fixed_2x2.json"))
        .output()
        .unwrap());
    let value: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(value["v"], 1);
    assert_eq!(value["series"][0]["aggregate"]["mean"].as_array().unwrap().len(), 50);
}

#[test]
fn bound_for_the_fixed_instance() {
    let stdout = ok(bin()
        .args(["bound", "--horizon", "10000", "--instance"])
        .arg(configs().join("fixed_2x2_instance.json"))
        .output()
        .unwrap());
    let bound: f64 = stdout.trim().parse().unwrap();
    assert!((bound - 4979.0).abs() < 0.05, "{bound}");
    let conservative: f64 = ok(bin()
        .args(["bound", "--horizon", "10000", "--conservative", "--instance"])
        .arg(configs().join("fixed_2x2_instance.json"))
        .output()
        .unwrap())
    .trim()
    .parse()
    .unwrap();
    assert!(conservative >= bound);
}

#[test]
fn figure_smoke() {
    let stdout = ok(bin()
        .args(["figure", "L_sweep", "--runs", "2", "--horizon", "20"])
        .output()
        .unwrap());
    assert_eq!(stdout.lines().count(), 1 + 4 * 20);
}

#[test]
fn verify_theorem_reports() {
    let stdout = ok(bin()
        .args(["verify-theorem", "--horizon", "2000", "--runs", "4"])
        .output()
        .unwrap());
    assert!(stdout.contains("holds"), "{stdout}");
}

#[test]
fn errors_exit_nonzero() {
    let missing = bin().args(["run", "--config", "/nonexistent.json"]).output().unwrap();
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nonexistent"));
    let figure = bin().args(["figure", "nope"]).output().unwrap();
    assert!(!figure.status.success());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"v": 1, "instance": {"kind": "fixed2x2"}, "agents": [], "horizon": 10}"#).unwrap();
    assert!(!bin().arg("run").arg("--config").arg(&bad).output().unwrap().status.success());
    assert!(!bin().args(["run", "--format", "xml", "--config"]).arg(&bad).output().unwrap().status.success());
}
