use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zygdist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is json")
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut all = vec!["generate", "--out", path.to_str().unwrap()];
    all.extend_from_slice(args);
    let out = run(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn estimate(report: &Value, quantity: &str) -> f64 {
    report["estimates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["quantity"] == quantity)
        .unwrap_or_else(|| panic!("no estimate {quantity}"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn generate_writes_a_valid_function_file() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "hat.json", &["--kind", "hat", "--depth", "5"]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(file["format"], "zygdist-function");
    assert_eq!(file["depth"], 5);
    let values = file["values"].as_array().unwrap();
    assert_eq!(values.len(), 33);
    assert_eq!(values[16].as_f64(), Some(0.5));
    assert_eq!(file["metadata"]["generator"]["kind"], "hat");
}

#[test]
fn generate_is_deterministic() {
    let a = run(&["generate", "--kind", "random-jumps", "--depth", "6", "--seed", "9"]);
    let b = run(&["generate", "--kind", "random-jumps", "--depth", "6", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seminorm_of_linear_is_zero() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "lin.json", &["--kind", "linear", "--depth", "8"]);
    let out = run(&["seminorm", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["status"], "ok");
    assert_eq!(estimate(&report, "zygmund seminorm"), 0.0);
    assert_eq!(estimate(&report, "dyadic zygmund seminorm"), 0.0);
}

#[test]
fn distance_threshold_of_random_jumps() {
    let dir = TempDir::new().unwrap();
    let path = generate(
        &dir.path(),
        "rj.json",
        &["--kind", "random-jumps", "--depth", "10", "--delta", "0.5", "--seed", "3"],
    );
    let out = run(&["distance-ibmo", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let t = estimate(&json(&out), "threshold D");
    assert!((t - 1.0).abs() <= 0.1, "threshold {t}");
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "tk.json", &["--kind", "lacunary", "--depth", "9"]);
    let p = path.to_str().unwrap();
    for cmd in ["strichartz", "distance-ibmo", "sobolev"] {
        let one = run(&[cmd, "--in", p, "--threads", "1"]);
        let four = run(&[cmd, "--in", p, "--threads", "4"]);
        assert_eq!(code(&one), code(&four));
        assert_eq!(one.stdout, four.stdout, "{cmd}");
    }
    let one = run(&["verify", "--suite", "lemmas", "--samples", "500", "--threads", "1"]);
    let four = run(&["verify", "--suite", "lemmas", "--samples", "500", "--threads", "4"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn timing_is_opt_in() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "sq.json", &["--kind", "square", "--depth", "6"]);
    let plain = json(&run(&["seminorm", "--in", path.to_str().unwrap()]));
    assert!(plain.get("wall_time_seconds").is_none());
    let timed = json(&run(&["seminorm", "--in", path.to_str().unwrap(), "--timing"]));
    assert!(timed["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(timed["command"], plain["command"]);
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "hat.json", &["--kind", "hat", "--depth", "6"]);
    let report = dir.path().join("report.json");
    let out = run(&["seminorm", "--in", path.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(report).unwrap();
    assert_eq!(text, String::from_utf8(run(&["seminorm", "--in", path.to_str().unwrap()]).stdout).unwrap());
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format\": \"zygdist-function\"").unwrap();
    let out = run(&["seminorm", "--in", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());

    std::fs::write(
        &bad,
        r#"{"format":"zygdist-function","schema_version":1,"depth":2,"values":[0,1,2]}"#,
    )
    .unwrap();
    let out = run(&["seminorm", "--in", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("values"));

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["seminorm", "--in", missing.to_str().unwrap()])), 2);
}

#[test]
fn bad_parameters_exit_with_two() {
    assert_eq!(code(&run(&["generate", "--kind", "hat", "--depth", "0"])), 2);
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "hat.json", &["--kind", "hat", "--depth", "8"]);
    let p = path.to_str().unwrap();
    assert_eq!(code(&run(&["strichartz", "--in", p, "--depths", "4,6"])), 2);
    assert_eq!(code(&run(&["strichartz", "--in", p, "--depths", "4,6,12"])), 2);
    assert_eq!(code(&run(&["distance-ibmo", "--in", p, "--eps-grid", "-1"])), 2);
    assert_eq!(code(&run(&["seminorm", "--in", p, "--threads", "0"])), 2);
}

#[test]
fn unresolved_threshold_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "tk.json", &["--kind", "lacunary", "--depth", "10"]);
    let out = run(&["distance-ibmo", "--in", path.to_str().unwrap(), "--eps-grid", "0.001,0.002"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["status"], "inconclusive");
}

#[test]
fn measure_commands_accept_measure_files() {
    let dir = TempDir::new().unwrap();
    let path = generate(
        &dir.path(),
        "mu.json",
        &["--kind", "cascade", "--dim", "2", "--depth", "5", "--theta", "0.25"],
    );
    let p = path.to_str().unwrap();
    let out = run(&["measure", "--in", p]);
    assert!(matches!(code(&out), 0 | 3), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(code(&run(&["seminorm", "--in", p])), 0);
    assert_eq!(code(&run(&["strichartz", "--in", p])), 2);
}

#[test]
fn decompose_reconstructs_the_input() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir.path(), "rj.json", &["--kind", "random-jumps", "--depth", "6"]);
    let out = run(&["decompose", "--in", path.to_str().unwrap(), "--eps-grid", "0.5,1.5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_suite_passes() {
    for suite in ["lemmas", "predecessor", "bdg", "measures"] {
        let out = run(&["verify", "--suite", suite, "--samples", "2000", "--seed", "1"]);
        assert_eq!(code(&out), 0, "{suite}");
        let report = json(&out);
        assert_eq!(report["seed"], 1);
        assert!(!report["verification"].as_array().unwrap().is_empty());
    }
}

#[test]
fn golden_report_is_reproduced() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = Command::new(env!("CARGO_BIN_EXE_zygdist"))
        .current_dir(&root)
        .args(["distance-ibmo", "--in", "docs/random-jumps.json", "--depths", "4,6,8"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let golden = std::fs::read(root.join("docs/golden-report.json")).unwrap();
    assert_eq!(out.stdout, golden);
}
