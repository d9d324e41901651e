use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use oulink::analytic::z_transition_pdf;
use oulink::{CirParams, MobilityParams};
use serde_json::Value;
use tempfile::TempDir;

fn oulink(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oulink"))
        .current_dir(dir)
        .env_remove("OULINK_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = oulink(dir, args);
    assert!(
        out.status.success(),
        "oulink {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Header metadata and numeric rows of a CSV artifact.
fn read_csv(path: &Path) -> (Value, Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().strip_prefix("# ").expect("metadata line");
    let meta: Value = serde_json::from_str(header).unwrap();
    let columns = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (meta, columns, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn snr_cdf_is_monotone_and_ends_near_one() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["dist", "--curve", "snr-cdf-nofading", "--eta", "4", "--out", "o"]);
    let (meta, columns, rows) = read_csv(&tmp.path().join("o/snr-cdf-nofading.csv"));
    assert_eq!(columns, ["rho", "cdf"]);
    assert_eq!(meta["config"]["eta"], "4");
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] >= w[0][1]));
    let last = rows.last().unwrap()[1];
    assert!(last > 0.99 && last <= 1.0, "cdf ends at {last}");
}

#[test]
fn faded_density_for_rational_exponent_is_normalized() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["dist", "--curve", "snr-pdf-fading", "--eta", "3/1", "--points", "40", "--out", "o"]);
    let (_, _, rows) = read_csv(&tmp.path().join("o/snr-pdf-fading.csv"));
    assert!(rows.iter().all(|r| r[1].is_finite() && r[1] >= 0.0));
    let mass = read_json(&tmp.path().join("o/snr-pdf-fading.json"))["result"]["normalization"]
        .as_f64()
        .unwrap();
    assert!((mass - 1.0).abs() < 1e-6, "normalization {mass}");
}

#[test]
fn transition_curve_matches_library() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["dist", "--curve", "z-transition", "--lag", "0.2", "--z0", "3000", "--out", "o"]);
    let (_, _, rows) = read_csv(&tmp.path().join("o/z-transition.csv"));
    let cir: CirParams = MobilityParams::new(1.0, 100.0, 0.0).unwrap().cir();
    for r in &rows[1..] {
        let want = z_transition_pdf(r[0], 3000.0, 0.2, &cir).unwrap();
        assert!((r[1] - want).abs() <= 1e-12 * want.max(1e-300), "z = {}: {} vs {want}", r[0], r[1]);
    }
}

#[test]
fn invalid_grid_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = oulink(tmp.path(), &["dist", "--curve", "z-stationary-pdf", "--min", "5", "--max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = oulink(tmp.path(), &["dist", "--curve", "snr-pdf-nofading", "--points", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evaluation_outside_the_support_is_a_numerical_error() {
    let tmp = TempDir::new().unwrap();
    let out = oulink(
        tmp.path(),
        &["dist", "--curve", "snr-pdf-nofading", "--spacing", "linear", "--min", "0", "--max", "1"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn simulation_is_byte_reproducible() {
    let tmp = TempDir::new().unwrap();
    for dir in ["a", "b"] {
        ok(tmp.path(), &["--seed", "11", "simulate", "--process", "pair", "--steps", "500", "--out", dir]);
    }
    for f in ["positions.csv", "z.csv", "r.csv", "simulate.json"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    ok(tmp.path(), &["--seed", "12", "simulate", "--process", "pair", "--steps", "500", "--out", "c"]);
    assert_ne!(fs::read(tmp.path().join("a/z.csv")).unwrap(), fs::read(tmp.path().join("c/z.csv")).unwrap());
}

#[test]
fn trajectory_export_has_both_nodes() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["simulate", "--process", "pair", "--steps", "200", "--out", "o"]);
    let (meta, columns, pos) = read_csv(&tmp.path().join("o/positions.csv"));
    assert_eq!(columns, ["t", "x1", "y1", "x2", "y2"]);
    assert_eq!(pos.len(), 201);
    assert_eq!(meta["config"]["seed"], 20_150_601);
    let (_, _, z) = read_csv(&tmp.path().join("o/z.csv"));
    for (p, z) in pos.iter().zip(&z) {
        let d2 = (p[1] - p[3]).powi(2) + (p[2] - p[4]).powi(2);
        assert!((d2 - z[1]).abs() <= 1e-9 * d2.max(1.0));
    }
}

#[test]
fn euler_snr_path_stays_positive() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["simulate", "--process", "snr-euler", "--eta", "2", "--steps", "5000", "--out", "o"]);
    let (_, _, rows) = read_csv(&tmp.path().join("o/snr-euler.csv"));
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[1].is_finite()));
    let diag = &read_json(&tmp.path().join("o/simulate.json"))["result"]["diagnostics"];
    assert!(diag["clamp_rate"].is_number());
    // An overflow ends the path early and is reported.
    match diag["blow_up"].as_u64() {
        None => assert_eq!(rows.len(), 5001),
        Some(step) => assert!(rows.len() as u64 <= step + 1 && rows.len() < 5001),
    }
}

#[test]
fn faded_snr_and_gain_exports() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["simulate", "--process", "gain", "--steps", "300", "--out", "g"]);
    let (_, columns, rows) = read_csv(&tmp.path().join("g/gain.csv"));
    assert_eq!(columns, ["t", "gain", "in_phase", "quadrature"]);
    for r in &rows {
        assert!((r[1] - (r[2] * r[2] + r[3] * r[3])).abs() <= 1e-12 * r[1].max(1.0));
    }
    ok(tmp.path(), &["simulate", "--process", "snr", "--fading", "--steps", "300", "--out", "s"]);
    let (_, _, rows) = read_csv(&tmp.path().join("s/snr.csv"));
    assert!(rows.iter().all(|r| r[1] >= 0.0));
}

#[test]
fn verify_only_runs_the_named_job() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["verify", "--only", "fig9", "--out", "o"]);
    let doc = read_json(&tmp.path().join("o/verify.json"));
    let reports = doc["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["name"], "fig9");
    assert_eq!(doc["result"]["passed"], true);
    assert!(tmp.path().join("o/fig9.csv").exists());
}

#[test]
fn wrong_theta_fails_verification() {
    let tmp = TempDir::new().unwrap();
    let out = oulink(tmp.path(), &["verify", "--only", "fig5", "--theta-override", "220", "--out", "o"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig5"));
}

#[test]
fn unknown_job_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = oulink(tmp.path(), &["verify", "--only", "fig99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_threshold_is_always_connected() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["--rho-th", "0", "crossings", "--steps", "2000", "--out", "o"]);
    let summary = &read_json(&tmp.path().join("o/crossings.json"))["result"];
    assert_eq!(summary["fraction_on"], 1.0);
    let (_, _, off) = read_csv(&tmp.path().join("o/off-durations.csv"));
    assert!(off.is_empty());
}

#[test]
fn crossing_fraction_matches_connectivity() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &[
            "--tau", "0.6", "--diffusion", "4", "--eta", "2", "--rho-th-db", "2", "--dt", "0.006",
            "crossings", "--steps", "1000000", "--out", "o",
        ],
    );
    let summary = &read_json(&tmp.path().join("o/crossings.json"))["result"];
    let z = summary["z_score"].as_f64().unwrap();
    assert!(z.abs() < 3.0, "z = {z}");
    let (_, columns, path) = read_csv(&tmp.path().join("o/path.csv"));
    assert_eq!(columns, ["t", "snr", "threshold"]);
    let db2 = 10f64.powf(0.2);
    assert!(path.iter().all(|r| (r[2] - db2).abs() < 1e-12));
}

#[test]
fn config_file_and_flag_overrides() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("run.cfg"), "# slow nodes\ntau = 0.5\ndiffusion = 10\nseed = 3\n").unwrap();
    ok(tmp.path(), &["--config", "run.cfg", "--diffusion", "20", "simulate", "--steps", "10", "--out", "o"]);
    let (meta, _, _) = read_csv(&tmp.path().join("o/z.csv"));
    assert_eq!(meta["config"]["tau"], 0.5);
    assert_eq!(meta["config"]["diffusion"], 20.0);
    assert_eq!(meta["config"]["seed"], 3);
}

#[test]
fn metadata_header_reproduces_the_run() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &["--seed", "99", "--tau", "0.3", "--eta", "2.5", "simulate", "--process", "snr", "--steps", "400", "--out", "a"],
    );
    ok(tmp.path(), &["--config", "a/snr.csv", "simulate", "--process", "snr", "--steps", "400", "--out", "b"]);
    assert_eq!(fs::read(tmp.path().join("a/snr.csv")).unwrap(), fs::read(tmp.path().join("b/snr.csv")).unwrap());
}

#[test]
fn output_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_oulink"))
        .current_dir(tmp.path())
        .env("OULINK_OUT_DIR", "from-env")
        .args(["dist", "--curve", "z-autocov", "--points", "5"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("from-env/z-autocov.csv").exists());
}

#[test]
fn bad_config_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    for (name, text) in [
        ("unknown.cfg", "speed = 3\n"),
        ("dup.cfg", "tau = 1\ntau = 2\n"),
        ("nan.cfg", "tau = fast\n"),
        ("neg.cfg", "tau = -1\n"),
    ] {
        fs::write(tmp.path().join(name), text).unwrap();
        let out = oulink(tmp.path(), &["--config", name, "simulate", "--steps", "5"]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    let out = oulink(tmp.path(), &["--config", "missing.cfg", "simulate"]);
    assert_ne!(out.status.code(), Some(0));
}
