//! End-to-end tests of the binary: exit codes, file formats, flag/config
//! precedence, and the documented CSV shapes.

#![allow(clippy::needless_range_loop)]

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cascade-cavity"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .env_remove("CASCADE_CAVITY_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|line| line.split(',').map(|x| x.parse::<f64>().unwrap()).collect())
        .collect()
}

#[test]
fn default_run_writes_1001_rows_starting_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["simulate", "--out", "obs.csv"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("obs.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gt,S_atoms,S_atom1,negativity,mandel_Q,mean_n,S_x,S_y"
    );
    assert_eq!(text.lines().count(), 1002);
    let rows = read_rows(&dir.path().join("obs.csv"));
    let first = &rows[0];
    assert_eq!(first[0], 0.0);
    for (i, &v) in first.iter().enumerate().skip(1) {
        if i == 5 {
            assert!((v - 10.0).abs() < 1e-8, "mean_n at t=0: {v}");
        } else {
            assert!(v.abs() < 1e-8, "column {i} at t=0: {v}");
        }
    }
    assert!((rows.last().unwrap()[0] - 25.0).abs() < 1e-9);
}

#[test]
fn harmonious_rows_repeat_after_one_period() {
    let dir = tempfile::tempdir().unwrap();
    // grid step = 2π√2/1000, so rows k and k+500 sit exactly π√2 apart
    let t_max = 2.0 * std::f64::consts::PI * std::f64::consts::SQRT_2;
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--f",
            "harmonious",
            "--t-max",
            &format!("{t_max:.15}"),
            "--steps",
            "1000",
            "--out",
            "obs.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_rows(&dir.path().join("obs.csv"));
    for k in (0..500).step_by(25) {
        for col in 1..8 {
            let (a, b) = (rows[k][col], rows[k + 500][col]);
            assert!((a - b).abs() < 1e-6, "row {k} col {col}: {a} vs {b}");
        }
    }
}

#[test]
fn determinism_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = run_in(
            dir.path(),
            &[
                "simulate",
                "--f",
                "trapped-ion",
                "--t-max",
                "3",
                "--steps",
                "60",
                "--out",
                name,
            ],
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn validate_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["validate", "--t-max", "6", "--steps", "150"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(!stdout.contains("\nFAIL"));
    assert!(stdout.contains("closed-form-printed-deviates"));
    assert!(stdout.contains("BAND "));
}

#[test]
fn validate_fails_with_loose_integrator_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "validate",
            "--t-max",
            "6",
            "--steps",
            "150",
            "--ode-tol",
            "1e-2",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL norm-ode")));
}

#[test]
fn eigen_solver_with_detuning_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate", "--solver", "eigen", "--delta1", "0.1", "--out", "x.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--t-max",
            "1",
            "--steps",
            "4",
            "--out",
            "/nonexistent-dir-for-sure/x.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("i/o error"));
}

#[test]
fn detuned_run_defaults_to_ode_solver() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate", "--delta1", "0.3", "--delta2", "0.1", "--t-max", "2", "--steps", "20",
            "--out", "d.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver = Ode"));
    assert_eq!(read_rows(&dir.path().join("d.csv")).len(), 21);
}

#[test]
fn spectra_csv_carries_both_x3_variants() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "spectra",
            "--f",
            "harmonious",
            "--n-max",
            "8",
            "--out",
            "s.csv",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(text.starts_with("n,V1,V2,V3,V4,x1,x2,x3,x4,x5,eta,beta1,beta2,x3_printed"));
    let rows = read_rows(&dir.path().join("s.csv"));
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let (v3, x3, beta1, beta2, x3p) = (row[3], row[7], row[11], row[12], row[13]);
        assert!((beta1 - 8.0f64.sqrt()).abs() < 1e-10);
        assert!((beta2 - 2.0f64.sqrt()).abs() < 1e-10);
        assert!((x3p - x3 - 3.0 * v3 * v3).abs() < 1e-9);
    }

    let out = run_in(
        dir.path(),
        &[
            "spectra", "--f", "constant", "--n-max", "0", "--out", "c.csv",
        ],
    );
    assert!(out.status.success());
    let rows = read_rows(&dir.path().join("c.csv"));
    assert!((rows[0][6] - 82.0).abs() < 1e-9, "x2 of the n=0 block");
}

#[test]
fn flags_override_json_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{ "f": "constant", "t_max": 2.0, "steps": 50, "out": "from_file.csv" }"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["simulate", "--config", "run.json", "--steps", "20"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_rows(&dir.path().join("from_file.csv"));
    assert_eq!(rows.len(), 21, "flag --steps must beat the file's 50");
    assert!(
        (rows.last().unwrap()[0] - 2.0).abs() < 1e-9,
        "t_max from the file applies"
    );
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{ "no_such_key": 1 }"#).unwrap();
    let out = run_in(dir.path(), &["simulate", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_dir_env_var_redirects_relative_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("redirected");
    std::fs::create_dir(&out_dir).unwrap();
    let out = bin()
        .args([
            "simulate", "--t-max", "1", "--steps", "4", "--out", "obs.csv",
        ])
        .current_dir(dir.path())
        .env("CASCADE_CAVITY_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("obs.csv").exists());
    assert!(!dir.path().join("obs.csv").exists());
}

#[test]
fn amplitude_and_rho_dumps_have_documented_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--t-max",
            "1",
            "--steps",
            "2",
            "--out",
            "obs.csv",
            "--dump-amplitudes",
            "amps.csv",
            "--dump-rho",
            "0.5",
            "--rho-out",
            "rho.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let amps = std::fs::read_to_string(dir.path().join("amps.csv")).unwrap();
    let mut lines = amps.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,n,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,re_c4,im_c4,re_c5,im_c5,re_c6,im_c6"
    );
    // 3 times x 44 photon indices (cutoff 39 + 5)
    assert_eq!(amps.lines().count() - 1, 3 * 44);

    let rho = std::fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    let rows: Vec<&str> = rho.lines().collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.split(',').count() == 18));
    // Hermitian: diagonal imaginary parts vanish
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert!(first[1].abs() < 1e-12);
}

#[test]
fn errata_report_separates_the_two_variants() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--f",
            "constant",
            "--t-max",
            "2",
            "--steps",
            "10",
            "--out",
            "obs.csv",
            "--errata",
            "report",
            "--errata-out",
            "err.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_rows(&dir.path().join("err.csv"));
    assert_eq!(rows.len(), 11);
    let worst_printed = rows.iter().map(|r| r[1]).fold(0.0f64, f64::max);
    let worst_corrected = rows
        .iter()
        .flat_map(|r| r[7..13].iter().cloned())
        .fold(0.0f64, f64::max);
    assert!(worst_printed > 0.01, "printed C1 deviation {worst_printed}");
    assert!(
        worst_corrected < 1e-10,
        "corrected deviation {worst_corrected}"
    );

    // errata comparison is resonance-only
    let out = run_in(
        dir.path(),
        &[
            "simulate", "--delta1", "0.2", "--errata", "report", "--out", "x.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}
