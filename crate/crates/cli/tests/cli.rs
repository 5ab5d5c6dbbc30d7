use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn beamwave(dir: &Path, command: &str, config: &str, extra: &[&str]) -> std::process::Output {
    let path = dir.join(format!("{command}.json"));
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_beamwave"))
        .arg(command)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn solve_writes_wave_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let run = beamwave(
        tmp.path(),
        "solve",
        r#"{"command": "solve", "c": 1.0}"#,
        &["--verify", "--output-dir", out.to_str().unwrap()],
    );
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let csv = fs::read_to_string(out.join("wave.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,phi");
    assert_eq!(lines.len(), 1025);
    assert!(!csv.contains('\r'));
    let report = report(&out);
    assert_eq!(report["status"], "ok");
    assert!(report["artifacts"]["wave.csv"].is_string());
    assert!(report["headline"]["residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(report["checks"][0]["passed"], true);
    assert_eq!(report["config"]["grid"]["n_points"], 1024);
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"{"command": "solve", "c": 0.8, "grid": {"n_points": 256, "half_length": 30.0}}"#;
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let run = beamwave(
            tmp.path(),
            "solve",
            config,
            &["--output-dir", out.to_str().unwrap()],
        );
        assert_eq!(run.status.code(), Some(0));
    }
    let a = fs::read(tmp.path().join("a/wave.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/wave.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let run = beamwave(tmp.path(), "solve", r#"{"command": "solve", "c": 1.5}"#, &[]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("wavespeed must satisfy 0 ≤ c < √2 ≈ 1.41421"));

    let run = beamwave(
        tmp.path(),
        "nls-branch",
        r#"{"command": "nls-branch", "mu": 1.0, "omega": 0.2}"#,
        &[],
    );
    assert_eq!(run.status.code(), Some(2));

    let run = beamwave(
        tmp.path(),
        "solve",
        r#"{"command": "solve", "wavespeed": 1.0}"#,
        &[],
    );
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("unknown field"));

    let run = beamwave(tmp.path(), "kernel", r#"{"command": "solve"}"#, &[]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3_with_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let run = beamwave(
        tmp.path(),
        "solve",
        r#"{"command": "solve", "grid": {"n_points": 128}, "tolerances": {"newton": 1e-30}}"#,
        &["--output-dir", out.to_str().unwrap()],
    );
    assert_eq!(run.status.code(), Some(3));
    let report = report(&out);
    assert_eq!(report["status"], "failed");
    assert!(report["failure"].as_str().unwrap().contains("did not converge"));
}

#[test]
fn kernel_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let run = beamwave(
        tmp.path(),
        "kernel",
        r#"{"command": "kernel", "c": 0.0, "kernel": {"x_max": 10.0, "points": 21}}"#,
        &["--output-dir", out.to_str().unwrap()],
    );
    assert_eq!(run.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("kernel.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,K,K1,K2,K3");
    assert_eq!(lines.len(), 22);
    let middle: Vec<f64> = lines[11].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(middle[0], 0.0);
    assert!((middle[1] - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
    let rate = report(&out)["headline"]["decay_rate"].as_f64().unwrap();
    assert!((rate - 0.5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn variational_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let run = beamwave(
        tmp.path(),
        "variational",
        r#"{"command": "variational", "c": 1.0, "grid": {"n_points": 512}}"#,
        &["--output-dir", out.to_str().unwrap()],
    );
    assert_eq!(run.status.code(), Some(0));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out.join("variational.json")).unwrap()).unwrap();
    for key in ["lambda", "kappa", "M_lambda", "el_residual"] {
        assert!(summary[key].is_number(), "{key}");
    }
    assert!(summary["el_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn evolution_and_stability_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("evolve");
    let run = beamwave(
        tmp.path(),
        "evolve",
        r#"{"command": "evolve", "grid": {"n_points": 256}, "evolution": {"t_final": 0.5, "epsilon": 0.0, "sample_every": 50}}"#,
        &["--verify", "--output-dir", out.to_str().unwrap()],
    );
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let csv = fs::read_to_string(out.join("evolution.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,hamiltonian,sup_u,deviation");
    assert_eq!(lines.len(), 1 + 11);

    let out = tmp.path().join("stability");
    let run = beamwave(
        tmp.path(),
        "stability",
        r#"{"command": "stability", "grid": {"n_points": 256}}"#,
        &["--verify", "--output-dir", out.to_str().unwrap()],
    );
    assert_eq!(run.status.code(), Some(0));
    let spectrum: Value =
        serde_json::from_str(&fs::read_to_string(out.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(spectrum["verdict"], "unstable");
    assert_eq!(spectrum["counts"]["k_r"], 1);
    assert_eq!(spectrum["eigenvalues"][0].as_array().unwrap().len(), 2);
}

#[test]
fn short_branch() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let run = beamwave(
        tmp.path(),
        "branch",
        r#"{"command": "branch", "grid": {"n_points": 256},
            "continuation": {"param_start": 0.9, "param_end": 1.1, "ds": 0.05, "ds_max": 0.05}}"#,
        &["--verify", "--output-dir", out.to_str().unwrap()],
    );
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let csv = fs::read_to_string(out.join("branch.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "c,norm_phi_prime_sq,c_norm_phi_prime_sq,vk,max_re_lambda"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 4);
    assert_eq!(rows[0][0], 0.9);
    assert_eq!(rows[rows.len() - 1][0], 1.1);
    for row in &rows {
        assert!((row[2] - row[0] * row[1]).abs() < 1e-12 * row[2].abs());
        assert!(row[3] > 0.0 && row[4] > 1e-4);
    }
    // Momentum increases on the unstable side.
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2]));
    let report = report(&out);
    assert!(report["headline"]["c_star"].is_null());
}
