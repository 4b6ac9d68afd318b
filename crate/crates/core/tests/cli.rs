//! End-to-end runs of the `ergomfg` binary on the shipped configurations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ergomfg::cli::HjbReport;
use ergomfg::control::ControlSolution;
use ergomfg::mfg::{CurveSamples, EquilibriumPoint};
use ergomfg::sim::NPlayerResult;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergomfg")).args(args).output().unwrap()
}

fn run_config(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = configs().join(name);
    let mut args = vec![cmd, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn solve_control_on_the_multiplicative_ou() {
    let sol: ControlSolution = serde_json::from_str(&stdout(&run_config("solve-control", "fig1_left.json", &[]))).unwrap();
    assert!((sol.thresholds.a + 0.646).abs() < 5e-3);
    assert!((sol.thresholds.b - 0.646).abs() < 5e-3);
    assert!((sol.thresholds.a + sol.thresholds.b).abs() < 1e-9);
    assert!(sol.assumption_report.all_pass());
}

#[test]
fn solve_mfg_outputs() {
    let fig3: Vec<EquilibriumPoint> = serde_json::from_str(&stdout(&run_config("solve-mfg", "fig3.json", &[]))).unwrap();
    assert_eq!(fig3.len(), 3);
    let none: Vec<EquilibriumPoint> = serde_json::from_str(&stdout(&run_config("solve-mfg", "fig2_right.json", &[]))).unwrap();
    assert!(none.is_empty());
    let csv = stdout(&run_config("solve-mfg", "fig1_left.json", &["--format", "csv"]));
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("a,b,R_value,value"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = run_config("solve-mfg", "fig3.json", &[]);
    let b = run_config("solve-mfg", "fig3.json", &[]);
    assert_eq!(stdout(&a), stdout(&b));
    let sim = ["--interval", "-0.65,0.65", "--seed", "3"];
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("fig1_left.json"))
        .unwrap()
        .replace("\"t_max\": 200.0", "\"t_max\": 5.0")
        .replace("\"burn_in\": 10.0", "\"burn_in\": 1.0")
        .replace("\"paths\": 64", "\"paths\": 4");
    let cfg = write_config(&dir, "short.json", &text);
    let s1 = stdout(&run(&[&["simulate", "--config", &cfg][..], &sim[..]].concat()));
    let s2 = stdout(&run(&[&["simulate", "--config", &cfg][..], &sim[..]].concat()));
    assert_eq!(s1, s2);
    let v: serde_json::Value = serde_json::from_str(&s1).unwrap();
    assert_eq!(v["seed"], 3);
}

#[test]
fn trace_curves_csv() {
    let csv = stdout(&run_config("trace-curves", "fig2_left.json", &["--scan", "-2,2,41"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("curve,a,b"));
    let spreads: Vec<f64> = lines
        .filter(|l| l.starts_with("cond_i,"))
        .map(|l| {
            let f: Vec<f64> = l.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
            f[1] - f[0]
        })
        .collect();
    assert!(spreads.len() > 10);
    assert!(spreads.iter().all(|s| (s - spreads[0]).abs() < 1e-8));

    let json = stdout(&run_config("trace-curves", "fig1_left.json", &["--format", "json"]));
    let curves: CurveSamples = serde_json::from_str(&json).unwrap();
    let near = |pts: &[(f64, f64)]| pts.iter().any(|&(a, b)| (a + 0.646).abs() < 0.06 && (b - 0.646).abs() < 0.06);
    assert!(near(&curves.cond_i) && near(&curves.cond_ii));
}

#[test]
fn trace_curves_on_an_empty_window_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "flat.json",
        r#"{
            "model": {"family": "bm_drift", "params": {"mu": 0.0, "sigma": 1.0}, "reference_point": 0.0},
            "cost": {"family": "quadratic", "params": {"center": 0.0, "scale": 1.0}, "q_u": 0.1, "q_d": 0.1, "market_statistic": {"kind": "poly", "coeffs": [1.0]}},
            "scan": {"lo": 10.0, "hi": 12.0, "grid_n": 21}
        }"#,
    );
    let csv = stdout(&run(&["trace-curves", "--config", &cfg]));
    assert_eq!(csv, "curve,a,b\n");
}

#[test]
fn verify_hjb_passes_at_the_optimum_and_fails_off_it() {
    let at: HjbReport = serde_json::from_str(&stdout(&run_config("verify-hjb", "fig1_left.json", &[]))).unwrap();
    assert!(at.report.pass);
    assert!((at.lambda - at.ergodic_cost).abs() < 1e-6);
    let off: HjbReport = serde_json::from_str(&stdout(&run_config("verify-hjb", "fig1_left.json", &["--interval", "-0.95,0.65"]))).unwrap();
    assert!(!off.report.pass);
}

#[test]
fn nplayer_with_a_single_point_grid() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("fig1_left.json"))
        .unwrap()
        .replace("\"t_max\": 200.0", "\"t_max\": 4.0")
        .replace("\"burn_in\": 10.0", "\"burn_in\": 1.0")
        .replace("\"paths\": 64", "\"paths\": 3")
        .replace("\"nplayer\": {\"n\": 32, \"delta\": 0.3}", "\"nplayer\": {\"n\": 4, \"equilibrium\": {\"a\": -0.64775, \"b\": 0.64775}, \"grid\": [{\"a\": -0.64775, \"b\": 0.64775}]}");
    let cfg = write_config(&dir, "np.json", &text);
    let res: NPlayerResult = serde_json::from_str(&stdout(&run(&["nplayer", "--config", &cfg]))).unwrap();
    assert_eq!(res.epsilon_hat, 0.0);
    assert_eq!(res.n, 4);
}

#[test]
fn config_errors_exit_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("fig1_left.json")).unwrap().replace("\"q_u\": 0.1", "\"q_u\": 0.0");
    let cfg = write_config(&dir, "bad.json", &text);
    let out = run(&["solve-control", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q_u"));

    let out = run(&["solve-mfg", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = run_config("solve-control", "fig3.json", &[]);
    assert_eq!(out.status.code(), Some(1), "no frozen y");
    let out = run(&["solve-mfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_equilibrium_exits_two() {
    let out = run_config("nplayer", "fig2_right.json", &["--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.json");
    let out = run_config("solve-mfg", "fig1_left.json", &["--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let points: Vec<EquilibriumPoint> = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(points.len(), 1);
}
