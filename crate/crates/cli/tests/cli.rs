use std::path::Path;
use std::process::{Command, Output};

fn cdlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("CDLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn uniform_circle_gaps_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdlab(&["verify-circle", "--uniform", "--n", "5..50", "--k", "1..4"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("discrepancy.csv")).unwrap();
    assert!(csv.starts_with("# cdlab discrepancy v1\nn,k,mu_moment_re,mu_moment_im,nu_moment_re,nu_moment_im,gap,bound,ok\n"));
    let rows = csv_rows(&dir.path().join("discrepancy.csv"));
    assert_eq!(rows.len(), 46 * 4);
    for r in rows {
        assert!(r[6].parse::<f64>().unwrap() < 1e-12);
        assert_eq!(r[8], "true");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["metadata"]["spec_sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["metadata"]["tolerances"].is_object());
}

#[test]
fn chebyshev_gap_column_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdlab(&["verify-real", "--chebyshev", "--n", "4..100", "--k", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("discrepancy.csv"));
    assert_eq!(rows.len(), 97);
    for r in rows {
        let n: f64 = r[0].parse().unwrap();
        let gap: f64 = r[6].parse().unwrap();
        let exact = 0.25 / (n + 1.0);
        assert!((gap - exact).abs() <= 1e-8 * exact);
    }
}

#[test]
fn selftest_passes() {
    let out = Command::new(env!("CARGO_BIN_EXE_cdlab")).arg("selftest").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all passed"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cdlab(&["verify-circle", "--frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(cdlab(&["verify-circle"], dir.path()).status.code(), Some(1));
    assert_eq!(cdlab(&["verify-circle", "--chebyshev"], dir.path()).status.code(), Some(1));
    let out = cdlab(&["corollary", "--uniform", "--radius", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));
    assert_eq!(cdlab(&["zeros", "--chebyshev", "--n", "9..3"], dir.path()).status.code(), Some(1));
}

#[test]
fn strict_config_names_offending_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "zeros", "measure": {"preset": "chebyshev"}, "degree": 4}"#).unwrap();
    let out = cdlab(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree"));

    std::fs::write(&cfg, r#"{"command": "corollary", "measure": {"preset": "chebyshev"}, "radius": 0.5}"#).unwrap();
    let out = cdlab(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));
}

#[test]
fn minimal_config_runs_with_defaults_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "rho", "measure": {"preset": "chebyshev"}}"#).unwrap();
    let out = cdlab(&["run", cfg.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let echoed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/run.json")).unwrap()).unwrap();
    assert_eq!(echoed["k"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(echoed["n"]["start"], 5);
    assert!(echoed["tolerances"]["winding"].is_number());
}

#[test]
fn rerun_from_echoed_config_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let out = cdlab(
        &["verify-circle", "--random", "circle", "--seed", "42", "--n", "10,20,50", "--k", "1..8"],
        &a,
    );
    assert_eq!(out.status.code(), Some(0));
    let out = cdlab(&["run", a.join("run.json").to_str().unwrap()], &b);
    assert_eq!(out.status.code(), Some(0));
    for f in ["discrepancy.csv", "manifest.json", "run.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_cdlab"))
        .args(["zeros", "--chebyshev", "--n", "3"])
        .env("CDLAB_OUT_DIR", &env_out)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&env_out.join("zeros.csv"));
    assert_eq!(rows.len(), 3);
    let w: f64 = rows[0][5].parse().unwrap();
    assert!((w - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn remaining_subcommands_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["zeros", "--uniform", "--n", "1..4"],
        &["prufer", "--uniform", "--n", "5,20"],
        &["prufer", "--chebyshev", "--n", "5,10", "--points", "2000"],
        &["rho", "--chebyshev", "--n", "2..5", "--k", "0..10"],
        &["bernstein-szego", "--uniform", "--n", "5,20"],
        &["corollary", "--chebyshev", "--n", "4,10", "--k", "0..4", "--radius", "2"],
        &["corollary", "--uniform", "--n", "4,8", "--k", "0..3", "--radius", "2"],
    ];
    for args in cases {
        let out = cdlab(args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let rows = csv_rows(&dir.path().join("corollary.csv"));
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() < 1e-12));
}
