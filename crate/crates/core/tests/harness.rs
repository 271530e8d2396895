use std::process::Command;

use equicont::harness::*;
use equicont::{BranchStatus, Error, Verdict};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equicont"))
}

#[test]
fn catalog_covers_every_problem_family() {
    let all = catalog();
    assert!(all.len() >= 6);
    for name in [
        "cmc-plane",
        "cmc-sphere",
        "cmc-torus",
        "geodesic-flat",
        "geodesic-channel",
        "geodesic-lorentz",
        "harmonic-circle",
        "harmonic-sphere",
    ] {
        assert!(all.iter().any(|e| e.name == name), "{name}");
    }
}

#[test]
fn catalog_configs_round_trip() {
    for e in catalog() {
        let text = e.config.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back, e.config, "{}", e.name);
        let a = assemble(&back).unwrap();
        assert_eq!(a.problem.name(), e.name);
    }
}

#[test]
fn unknown_names_suggest_the_nearest() {
    match lookup("cmc-plain") {
        Err(Error::Unknown { hint, .. }) => assert!(hint.contains("cmc-plane")),
        other => panic!("{other:?}"),
    }
    let text = "[problem]\nkind = \"cmc\"\nambient = \"sphre\"\n";
    let config = ExperimentConfig::from_toml(text).unwrap();
    match assemble(&config) {
        Err(Error::Unknown { hint, .. }) => assert!(hint.contains("sphere")),
        other => panic!("{:?}", other.err()),
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mut c = lookup("cmc-plane").unwrap().config;
    c.solver.newton_tol = -1.0;
    assert!(matches!(assemble(&c), Err(Error::Config(_))));
    let mut c = lookup("cmc-plane").unwrap().config;
    c.run.lambda_target = Some(10.0);
    assert!(matches!(assemble(&c), Err(Error::Config(_))));
    let mut c = lookup("harmonic-circle").unwrap().config;
    c.problem = ProblemConfig::Harmonic {
        target: "circle".into(),
        family: "lorentz_flat".into(),
        eps: 0.0,
        degree: [1, 0],
    };
    assert!(matches!(assemble(&c), Err(Error::Config(_))));
    assert!(ExperimentConfig::from_toml("[problem]\nkind = \"cmc\"\nambient = \"plane\"\nextra = 1\n").is_err());
}

#[test]
fn plane_continuation_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = lookup("cmc-plane").unwrap().config;
    let report = run(&config, Some(dir.path())).unwrap();
    assert!(report.passed);
    let table = std::fs::read_to_string(dir.path().join("branch.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "lambda,state_checksum,max_abs_multiplier,residual,kernel_dim");
    assert!(rows.len() > 20);
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 5);
        assert_eq!(cols[1].len(), 16);
        assert!(cols[2].parse::<f64>().unwrap() <= 1e-8);
        assert_eq!(cols[4], "2");
    }
    // states are stored at full precision and reproduce the checksums
    let states = std::fs::read_to_string(dir.path().join("states.csv")).unwrap();
    for (row, srow) in rows[1..].iter().zip(states.lines()) {
        let values: Vec<f64> = srow.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        assert_eq!(state_checksum(&values), row.split(',').nth(1).unwrap());
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["provenance"]["seed"], 0);
}

#[test]
fn identical_configs_give_identical_tables() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let config = lookup("geodesic-channel").unwrap().config;
    run(&config, Some(a.path())).unwrap();
    run(&config, Some(b.path())).unwrap();
    for f in ["branch.csv", "states.csv", "report.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn torus_continuation_reports_the_obstruction() {
    let report = run(&lookup("cmc-torus").unwrap().config, None).unwrap();
    let branch = report.branch.as_ref().unwrap();
    assert_eq!(branch.status, BranchStatus::Obstructed);
    assert!(branch.max_abs_multiplier > 1e-3);
    let check = report.checks.iter().find(|c| c.name == "max_abs_multiplier").unwrap();
    assert!(!check.passed && check.value == branch.max_abs_multiplier);
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn verify_suites_pass_on_defaults() {
    for name in ["cmc-plane", "cmc-sphere", "cmc-torus", "geodesic-channel", "geodesic-lorentz", "harmonic-circle"] {
        let mut config = lookup(name).unwrap().config;
        config.run.mode = RunMode::Verify;
        let report = run(&config, None).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{name}: {} = {:e} > {:e}", c.name, c.value, c.threshold);
        }
        assert!(report.checks.iter().any(|c| c.name == "gradient_fd_relative"));
    }
}

#[test]
fn degenerate_centers_are_refused() {
    let mut config = lookup("harmonic-sphere").unwrap().config;
    let report = run(&config, None).unwrap();
    let nd = report.nondegeneracy.as_ref().unwrap();
    assert_eq!(nd.verdict, Verdict::Degenerate);
    assert_eq!(report.exit_code(), 1);
    config.run.mode = RunMode::Project;
    let report = run(&config, None).unwrap();
    assert!(report.error.as_ref().unwrap().contains("degenerate orbit"));
    assert_eq!(report.exit_code(), 3);
}

#[test]
fn cli_exit_codes() {
    let out = bin().args(["list"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).lines().count() >= 6);

    let out = bin().args(["analyze", "--problem", "geodesic-chanel"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("geodesic-channel"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "[problem]\nkind = \"geodesic\"\nfamily = \"chanel_torus\"\neps = 0.1\nwinding = [0, 1]\n").unwrap();
    let out = bin().args(["analyze", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("channel_torus"));

    let out = bin().args(["analyze", "--problem", "geodesic-channel", "--n", "32", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("report.json").exists());

    let out = bin().args(["project", "--problem", "geodesic-flat"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin().args(["continue", "--problem", "cmc-torus", "--n", "32"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
