//! End-to-end tests against the compiled binary: golden scalars,
//! determinism, exit codes, and side files.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hamoracle")
}

fn fresh_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hamoracle-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}

/// Runs the binary with HAMORACLE_OUT_DIR pointed at `dir`.
fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin())
        .args(args)
        .env("HAMORACLE_OUT_DIR", dir)
        .output()
        .expect("spawn hamoracle");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn load_json(path: &Path) -> Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    serde_json::from_str(&text).expect("valid report JSON")
}

fn scalar(doc: &Value, key: &str) -> f64 {
    doc["scalars"][key]
        .as_f64()
        .unwrap_or_else(|| panic!("scalar {key} missing or non-numeric"))
}

#[test]
fn grover_continuous_golden() {
    let dir = fresh_dir("grover");
    let (code, _, stderr) = run_in(&dir, &["grover", "--n", "4", "--mode", "continuous"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let doc = load_json(&dir.join("grover.json"));
    let t_expected = 4.0 / (3.0 * 3.0f64.sqrt());
    assert!((scalar(&doc, "T") - t_expected).abs() < 1e-9);
    assert_eq!(scalar(&doc, "T_fg"), 1.0);
    assert_eq!(scalar(&doc, "x_trotter_pass"), 1.0);
    assert_eq!(doc["metadata"]["splitting"], "strang (symmetric second-order)");
    assert!(doc["metadata"]["versions"]["hamoracle-core"].is_string());
    assert!(doc["metadata"]["tolerances"]["x_trotter"].is_f64());
}

#[test]
fn grover_discrete_golden() {
    let dir = fresh_dir("grover-disc");
    let (code, _, stderr) = run_in(&dir, &["grover", "--n", "4", "--mode", "discrete"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let doc = load_json(&dir.join("grover.json"));
    assert_eq!(scalar(&doc, "queries"), 1.0);
    assert_eq!(scalar(&doc, "T"), 1.0);
    assert_eq!(scalar(&doc, "pwin_final_pass"), 1.0);

    let (code, _, stderr) = run_in(
        &dir,
        &["grover", "--n", "1000000", "--delta", "0.25", "--mode", "discrete"],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    let doc = load_json(&dir.join("grover.json"));
    assert_eq!(scalar(&doc, "time_ratio_vs_asymptote_pass"), 1.0);
}

#[test]
fn geodesic_solve_golden() {
    let dir = fresh_dir("geodesic");
    let (code, _, stderr) = run_in(&dir, &["geodesic", "--solve", "--csv"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let doc = load_json(&dir.join("geodesic.json"));
    assert!((scalar(&doc, "cos_theta0") - 0.7477).abs() < 5e-4);
    assert!((scalar(&doc, "T") - 0.9052).abs() < 5e-4);
    assert!(doc["curves"]["theta_of_t"].as_array().is_some_and(|a| !a.is_empty()));
    let csv = std::fs::read_to_string(dir.join("geodesic.csv")).expect("csv written");
    assert!(csv.starts_with("t,theta,phi,a0,a1,a2\n"));
    // Default --segments 200 plus endpoints-inclusive sampling.
    assert_eq!(csv.lines().count(), 202);
}

#[test]
fn reports_byte_identical_modulo_timestamp() {
    let mask = |text: &str| -> String {
        text.lines()
            .map(|l| {
                if l.trim_start().starts_with("\"timestamp_unix\":") {
                    "TS"
                } else {
                    l
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    for args in [
        vec!["grover", "--n", "7"],
        vec!["search", "--n", "1", "--segments", "20", "--restarts", "3", "--seed", "11"],
    ] {
        let name = format!("{}.json", args[0]);
        let dir_a = fresh_dir(&format!("det-a-{}", args[0]));
        let dir_b = fresh_dir(&format!("det-b-{}", args[0]));
        assert_eq!(run_in(&dir_a, &args).0, 0);
        assert_eq!(run_in(&dir_b, &args).0, 0);
        let a = std::fs::read_to_string(dir_a.join(&name)).expect("first report");
        let b = std::fs::read_to_string(dir_b.join(&name)).expect("second report");
        assert_eq!(mask(&a), mask(&b), "nondeterministic report for {args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = fresh_dir("usage");
    assert_eq!(run_in(&dir, &["grover", "--bogus"]).0, 2);
    assert_eq!(run_in(&dir, &["nonsense"]).0, 2);
    let (code, _, stderr) = run_in(&dir, &["grover", "--n", "1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("usage error"));
    assert_eq!(run_in(&dir, &["search", "--n", "13"]).0, 2);
}

#[test]
fn search_writes_certificate_schedule() {
    let dir = fresh_dir("search");
    let (code, stdout, stderr) = run_in(
        &dir,
        &["search", "--n", "1", "--segments", "20", "--restarts", "2", "--seed", "1"],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("schedule:"));
    let doc = load_json(&dir.join("search.json"));
    assert!(scalar(&doc, "best_pwin") >= 0.99);
    assert_eq!(scalar(&doc, "best_pwin_pass"), 1.0);
    let schedule = load_json(&dir.join("search_schedule.json"));
    let segments = schedule.as_array().expect("schedule is a JSON array");
    assert_eq!(segments.len(), 20);
    for seg in segments {
        assert!(seg["duration"].as_f64().is_some_and(|d| d > 0.0));
        assert_eq!(seg["b"].as_array().expect("b").len(), 2);
        assert_eq!(seg["c"].as_array().expect("c").len(), 2);
    }
}

#[test]
fn interrogation_discrete_table() {
    let dir = fresh_dir("interrogation");
    let (code, _, stderr) = run_in(&dir, &["interrogation", "--n", "5", "--mode", "discrete"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let doc = load_json(&dir.join("interrogation.json"));
    assert_eq!(scalar(&doc, "xor_at_half_queries"), 1.0);
    assert_eq!(scalar(&doc, "xor_below_half_queries"), 0.5);
    assert_eq!(doc["curves"]["achievable_xor"].as_array().expect("curve").len(), 6);
}

#[test]
fn out_flag_overrides_path() {
    let dir = fresh_dir("outflag");
    let target = dir.join("deep").join("nested").join("report.json");
    let out = Command::new(bin())
        .args(["distinguish", "--out"])
        .arg(&target)
        .output()
        .expect("spawn hamoracle");
    assert_eq!(out.status.code(), Some(0));
    let doc = load_json(&target);
    assert!((scalar(&doc, "t_one_sided") - 1.0).abs() < 1e-6);
    assert!((scalar(&doc, "t_two_sided") - 0.5).abs() < 1e-6);
}

#[test]
fn csv_projects_curves() {
    let dir = fresh_dir("csv");
    let (code, _, _) = run_in(&dir, &["grover", "--n", "4", "--csv"]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.join("grover.csv")).expect("csv written");
    assert!(csv.starts_with("curve,x,y\n"));
    assert!(csv.lines().any(|l| l.starts_with("x_of_t,")));
    assert!(csv.lines().any(|l| l.starts_with("pwin_of_t,")));
}

#[test]
fn verify_all_passes() {
    let dir = fresh_dir("verify");
    let (code, stdout, stderr) = run_in(&dir, &["verify-all"]);
    assert_eq!(code, 0, "stdout: {stdout}\nstderr: {stderr}");
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("PASS criterion")).count(),
        11,
        "stdout: {stdout}"
    );
    let doc = load_json(&dir.join("verify-all.json"));
    for id in 1..=11 {
        assert_eq!(
            scalar(&doc, &format!("c{id:02}_pass")),
            1.0,
            "criterion {id} failed"
        );
    }
    assert!(doc["metadata"]["tolerances"]["c01_minimal_two_bit_time"].is_f64());
}
