use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qlandscape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlandscape"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn hadamard_is_noncommuting() {
    let v = json(&qlandscape(&["classify"]));
    assert_eq!(v["case"], "NoncommutingAllT");
    assert_eq!(v["min_trap_free_t"], 0.0);
}

#[test]
fn verdict_has_exactly_six_keys() {
    let v = json(&qlandscape(&["classify", "--gate", "phase:2.5", "--t", "0.2"]));
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["alpha_w", "beta_w", "case", "d", "min_trap_free_t", "t0"]);
}

#[test]
fn small_phase_is_trap_free_for_all_t() {
    let v = json(&qlandscape(&["classify", "--gate", "phase", "--phi", "-1.0471975511965976"]));
    assert_eq!(v["case"], "CommutingSmallAlphaAllT");
    let alpha = v["alpha_w"].as_f64().unwrap();
    assert!((alpha - std::f64::consts::FRAC_PI_6).abs() < 1e-12);
}

#[test]
fn large_phase_has_threshold() {
    // diag(1, e^{2.5i}) has alpha_w = pi - 1.25 for the unit drift.
    let v = json(&qlandscape(&["classify", "--gate", "phase:2.5"]));
    assert_eq!(v["case"], "CommutingThreshold");
    let alpha = v["alpha_w"].as_f64().unwrap();
    let min_t = v["min_trap_free_t"].as_f64().unwrap();
    assert!((alpha - (std::f64::consts::PI - 1.25)).abs() < 1e-12);
    assert!((min_t - 1.25).abs() < 1e-12);
}

#[test]
fn matrix_and_pauli_forms_agree() {
    let pauli = json(&qlandscape(&["classify", "--h0", "0.2,0,0,1", "--v", "0,1,0,0.3"]));
    let matrix = json(&qlandscape(&[
        "classify", "--h0", "1.2,0,0,0,0,0,-0.8,0", "--v", "0.3,0,1,0,1,0,-0.3,0",
    ]));
    assert_eq!(pauli, matrix);
}

#[test]
fn commuting_system_exits_2() {
    let out = qlandscape(&["classify", "--h0", "0,0,0,1", "--v", "0,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("commute"));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["classify", "--gate", "toffoli"][..],
        &["classify", "--gate", "custom:1,0,0"],
        &["classify", "--gate", "phase"],
        &["classify", "--h0", "1,2,3"],
        &["scan-map", "--unknown-flag"],
        &["scan-map", "--alpha-grid", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(qlandscape(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn non_unitary_gate_exits_2() {
    let out = qlandscape(&["classify", "--gate", "custom:2,0,0,0,0,0,1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_0() {
    for args in [&["--help"][..], &["--version"], &["scan-map", "--help"]] {
        let out = qlandscape(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
    let help = String::from_utf8(qlandscape(&["optimize", "--help"]).stdout).unwrap();
    for flag in ["--h0", "--v", "--gate", "--phi", "--t", "--segments", "--starts", "--step", "--max-iters", "--tol", "--seed", "--out", "--config"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn map_csv_is_reproducible_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for path in &paths {
        let out = qlandscape(&[
            "scan-map", "--alpha-grid", "3", "--phiw-grid", "4", "--samples", "10", "--seed", "7",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).contains("max p"));
    }
    let (a, b) = (fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
    assert_eq!(a, b);

    let rows = csv_rows(std::str::from_utf8(&a).unwrap());
    assert_eq!(rows[0], ["alpha", "phi_w", "j0", "p"]);
    assert_eq!(rows.len(), 1 + 3 * 4);
    for row in &rows[1..] {
        let p: f64 = row[3].parse().unwrap();
        // With 10 samples every estimate is a multiple of 1/10.
        assert!(((p * 10.0).round() - p * 10.0).abs() < 1e-9);
    }
}

#[test]
fn different_seeds_change_the_map() {
    let run = |seed: &str| {
        qlandscape(&["scan-map", "--alpha-grid", "1", "--phiw-grid", "8", "--samples", "50", "--seed", seed]).stdout
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn single_alpha_gives_single_row_block() {
    let out = qlandscape(&["scan-map", "--alpha-grid", "1", "--phiw-grid", "0.5,1.0", "--samples", "10"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 3);
    assert!(rows[1..].iter().all(|r| r[0] == "0"));
    assert_eq!(rows[1][1], "0.5");
    assert_eq!(rows[2][1], "1");
}

#[test]
fn hadamard_scan_csv() {
    let out = qlandscape(&["scan-hadamard", "--alpha-grid", "0,1.5,3", "--samples", "20"]);
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows[0], ["alpha", "p"]);
    assert_eq!(rows.len(), 4);
    for row in &rows[1..] {
        let p: f64 = row[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn optimize_with_zero_iterations_reports_initial_objective() {
    let v = json(&qlandscape(&["optimize", "--starts", "3", "--max-iters", "0", "--segments", "10"]));
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    for run in runs {
        assert_eq!(run["initial_j"], run["final_j"]);
        assert_eq!(run["iterations"], 0);
    }
    let best = runs.iter().map(|r| r["final_j"].as_f64().unwrap()).fold(f64::MIN, f64::max);
    assert_eq!(v["best_j"].as_f64().unwrap(), best);
}

#[test]
fn optimize_reaches_the_hadamard() {
    let v = json(&qlandscape(&["optimize", "--starts", "4", "--segments", "20"]));
    assert!(v["best_j"].as_f64().unwrap() > 0.99);
    assert_eq!(v["success_fraction"], 1.0);
}

#[test]
fn check_suite_passes_by_default() {
    let out = qlandscape(&["check"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn check_suite_fails_at_machine_precision() {
    let out = qlandscape(&["check", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "gate = \"phase\"\nphi = 2.5\nsamples = 10\nalpha_grid = 2\nphiw_grid = [0.5]\n").unwrap();
    let c = cfg.to_str().unwrap();

    let v = json(&qlandscape(&["classify", "--config", c]));
    assert_eq!(v["case"], "CommutingThreshold");
    let v = json(&qlandscape(&["--config", c, "classify", "--phi", "-0.5"]));
    assert_eq!(v["case"], "CommutingSmallAlphaAllT");

    let out = qlandscape(&["scan-map", "--config", c]);
    assert_eq!(csv_rows(&String::from_utf8(out.stdout).unwrap()).len(), 3);
    let out = qlandscape(&["scan-map", "--config", c, "--alpha-grid", "3"]);
    assert_eq!(csv_rows(&String::from_utf8(out.stdout).unwrap()).len(), 4);
}

#[test]
fn bad_config_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "samples = 10\nnonsense = true\n").unwrap();
    let out = qlandscape(&["classify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let missing = dir.path().join("missing.toml");
    let out = qlandscape(&["classify", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
