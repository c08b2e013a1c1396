use std::f64::consts::LN_2;
use std::path::Path;
use std::process::{Command, Output};

use approx::assert_abs_diff_eq;
use nmr_discord::correlations::werner_discord_analytic;
use nmr_discord::relaxmodel::{power_of_two_times, FidelitySeries, RelaxModelParams, SeriesKind};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nmr-discord"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header names and numeric rows of a CSV emitted by the tool.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# nmr-discord "), "{comment}");
    assert!(comment.contains("config={"), "{comment}");
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn werner_curves_end_rows() {
    let (header, rows) = table(&stdout(&run(&["werner-curves", "--steps", "11"])));
    assert_eq!(header, ["epsilon", "mutual_info_bits", "j_max_bits", "discord_bits", "geometric_discord"]);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0], ["0", "0", "0", "0", "0"]);
    assert_eq!(rows[10], ["1", "2", "1", "1", "0.5"]);
    for r in &rows {
        let eps = num(&r[0]);
        assert_abs_diff_eq!(num(&r[3]), werner_discord_analytic(eps).unwrap(), epsilon = 1e-11);
    }
}

#[test]
fn werner_curves_rejects_bad_range() {
    let out = run(&["werner-curves", "--eps-min", "0.6", "--eps-max", "0.4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prep_scan_has_thirteen_rows_and_peaks_at_quarter_turn() {
    let (_, rows) = table(&stdout(&run(&["prep-scan"])));
    assert_eq!(rows.len(), 13);
    assert_abs_diff_eq!(num(&rows[3][1]), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(num(&rows[3][2]), 1.0, epsilon = 1e-3);
    assert!(num(&rows[0][2]) <= 1e-3);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "dd", "--ensemble", "8", "--samples", "3", "--total-s", "0.05", "--grid-cos", "11", "--grid-phi", "10",
        "--seed", "42",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);

    let (_, rows) = table(&a);
    assert_eq!(rows.len(), 9);
    // the t = 0 rows agree across schemes apart from the scheme name
    let first: Vec<_> = rows.iter().filter(|r| r[1] == "0").map(|r| r[2..].to_vec()).collect();
    assert_eq!(first.len(), 3);
    assert!(first.iter().all(|r| *r == first[0]));
}

#[test]
fn dd_writes_udd_pulse_log() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("pulses.csv");
    let args = [
        "dd", "--scheme", "udd", "--ensemble", "2", "--samples", "2", "--total-s", "0.028", "--grid-cos", "5",
        "--grid-phi", "4", "--pulse-log", log.to_str().unwrap(),
    ];
    stdout(&run(&args));
    let (_, rows) = table(&std::fs::read_to_string(&log).unwrap());
    assert_eq!(rows.len(), 7);
    for (j, r) in rows.iter().enumerate() {
        let expect = 28.0 * (std::f64::consts::PI * (j + 1) as f64 / 16.0).sin().powi(2);
        assert_abs_diff_eq!(num(&r[2]), expect, epsilon = 1e-9);
    }
}

#[test]
fn spinlock_rows_and_artifact_gap() {
    let (_, rows) = table(&stdout(&run(&["spinlock", "--grid-cos", "41", "--grid-phi", "40"])));
    assert_eq!(rows.len(), 17);
    let fa0 = (2.0f64 / 3.0).sqrt();
    assert_abs_diff_eq!(num(&rows[0][2]), fa0, epsilon = 1e-4);
    assert!(num(&rows[16][3]) < 0.01);
    for r in &rows {
        assert_abs_diff_eq!(num(&r[3]), num(&r[4]), epsilon = 1e-3);
    }

    let (_, rows) = table(&stdout(&run(&["spinlock", "--artifact-coherence", "0.5", "--grid-cos", "41", "--grid-phi", "40"])));
    assert!(num(&rows[0][4]) > num(&rows[0][3]) + 1e-2);
    assert_abs_diff_eq!(num(&rows[16][3]), num(&rows[16][4]), epsilon = 1e-6);
}

fn write_state(dir: &Path, args: &[&str]) -> String {
    let path = dir.join("state.json");
    let mut full = vec!["state", "-o", path.to_str().unwrap()];
    full.extend_from_slice(args);
    stdout(&run(&full));
    path.to_str().unwrap().to_string()
}

#[test]
fn discord_of_werner_state_file() {
    let dir = TempDir::new().unwrap();
    let path = write_state(dir.path(), &["--kind", "werner", "--epsilon", "0.3"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&run(&["discord", "--input", &path]))).unwrap();
    let d = report["discord_bits"].as_f64().unwrap();
    assert_abs_diff_eq!(d, werner_discord_analytic(0.3).unwrap(), epsilon = 5e-3);
    assert!(report["j_spread_bits"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["metadata"]["config"]["epsilon"], 0.3);

    let geo: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["discord", "--input", &path, "--method", "geometric"]))).unwrap();
    assert_abs_diff_eq!(geo["geometric_discord"].as_f64().unwrap(), 0.045, epsilon = 1e-12);
}

#[test]
fn bd_method_warns_on_non_bell_diagonal_input() {
    let dir = TempDir::new().unwrap();
    let path = write_state(dir.path(), &["--kind", "thermal", "--xi", "0.1"]);
    let out = run(&["discord", "--input", &path, "--method", "bd"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["discarded_norm"].as_f64().unwrap() > 0.0);
    assert!(report["warning"].is_string());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    let path = write_state(dir.path(), &["--kind", "bell-diagonal", "--r1", "-0.5", "--r2", "0.2", "--r3", "0.1"]);
    let report: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["discord", "--input", &path, "--method", "bd"]))).unwrap();
    assert!(report["warning"].is_null());
}

#[test]
fn invalid_state_files_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let path = write_state(dir.path(), &["--kind", "werner", "--epsilon", "0.5"]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let entry = v["re"][0][1].as_f64().unwrap();
    v["re"][0][1] = (entry + 1e-3).into();
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["discord", "--input", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not Hermitian") && err.contains("1.000e-3"), "{err}");

    v["im"][2] = serde_json::json!([0.0, "oops", 0.0, 0.0]);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["discord", "--input", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("im[2][1]"));
}

fn series_file(dir: &Path, name: &str, kind: SeriesKind, times: &[f64]) -> String {
    let path = dir.join(name);
    let s = FidelitySeries::from_model(kind, times, &RelaxModelParams::reference()).unwrap();
    s.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn fit_recovers_rates_jointly() {
    let dir = TempDir::new().unwrap();
    let times = power_of_two_times();
    let fa = series_file(dir.path(), "fa.csv", SeriesKind::Attenuated, &times);
    let f = series_file(dir.path(), "f.csv", SeriesKind::Fidelity, &times);
    let report: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["fit", "--input", &fa, "--fidelity-input", &f]))).unwrap();
    assert!((report["lambda1_inv_ms"].as_f64().unwrap() / 0.75 - 1.0).abs() < 1e-3);
    assert!((report["lambda2_inv_s"].as_f64().unwrap() / 26.0 - 1.0).abs() < 1e-3);
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 34);
    assert!(points.iter().all(|p| p["residual"].as_f64().unwrap().abs() < 1e-6));

    let alone: serde_json::Value = serde_json::from_str(&stdout(&run(&["fit", "--input", &fa]))).unwrap();
    assert!(alone["lambda1_per_s"].is_null());
    assert!((alone["lambda2_inv_s"].as_f64().unwrap() / 26.0 - 1.0).abs() < 1e-3);
}

#[test]
fn fit_with_three_points_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let path = series_file(dir.path(), "short.csv", SeriesKind::Attenuated, &[1e-3, 1.0, 10.0]);
    let out = run(&["fit", "--input", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient data"));
}

#[test]
fn config_file_overrides_flags_and_rejects_unknown_keys() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "steps = 3\neps_max = 0.5\n").unwrap();
    let text = stdout(&run(&["werner-curves", "--steps", "9", "--config", cfg.to_str().unwrap()]));
    assert!(text.lines().next().unwrap().contains(r#""steps":3"#));
    let (_, rows) = table(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][0], "0.5");

    std::fs::write(&cfg, "step = 3\n").unwrap();
    let out = run(&["werner-curves", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field `step`"));
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("w.csv");
    let out = run(&["werner-curves", "--steps", "2", "-o", path.to_str().unwrap()]);
    assert!(stdout(&out).is_empty());
    let (_, rows) = table(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows.len(), 2);
}

#[test]
fn spinlock_units_follow_reference_epsilon() {
    let text = stdout(&run(&["spinlock", "--xi", "3e-4", "--grid-cos", "21", "--grid-phi", "20"]));
    assert!(text.lines().next().unwrap().contains("reference_epsilon=0.0001"));
    let (_, rows) = table(&text);
    let t = num(&rows[8][0]);
    let eps = 1e-4 * (-t / 26.0).exp();
    let expected = werner_discord_analytic(eps).unwrap() / (1e-8 / LN_2);
    assert_abs_diff_eq!(num(&rows[8][4]), expected, epsilon = 1e-3);
}
