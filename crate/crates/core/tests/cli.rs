use std::process::Command;

use cartan_hartogs::cli::{run, run_cli, CheckKind, DomainName, Report, RunConfig, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

fn chd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chd"))
}

fn read_report(path: &std::path::Path) -> Report {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn strip_times(mut r: Report) -> Report {
    r.summary.wall_time_s = 0.0;
    for c in &mut r.checks {
        c.wall_time_s = 0.0;
    }
    r
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let code = run_cli([
        "chd", "verify", "darboux", "--domain", "type-I", "--p", "2", "--q", "2", "--mu", "0.5", "--points", "20",
        "--fd-step", "1e-5", "--tol", "1e-5", "--seed", "42", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_PASS);
    let r = read_report(&out);
    assert_eq!(r.checks.len(), 1);
    assert_eq!(r.checks[0].name, "darboux_residual");
    assert!(r.summary.all_pass);
    assert_eq!(r.config.seed, 42);
}

#[test]
fn runs_are_deterministic() {
    let cfg = RunConfig {
        domain: DomainName::TypeI,
        n: None,
        p: Some(2),
        q: Some(3),
        mu: vec![0.5, 2.0],
        checks: vec![CheckKind::Darboux, CheckKind::Volume, CheckKind::Equivariance],
        points: 10,
        samples: 20_000,
        seed: 9,
        ..RunConfig::default()
    };
    assert_eq!(strip_times(run(&cfg).unwrap()), strip_times(run(&cfg).unwrap()));
}

#[test]
fn unattainable_tolerance_exits_with_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let code = run_cli([
        "chd", "verify", "darboux", "--domain", "polydisc", "--n", "1", "--points", "5", "--tol", "1e-30", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_FAIL);
    let r = read_report(&out);
    assert!(!r.summary.all_pass);
    assert!(!r.checks[0].witnesses.is_empty());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run_cli(["chd", "verify", "nonsense"]), EXIT_USAGE);
    assert_eq!(run_cli(["chd", "duality", "--domain", "type-I", "--p", "2"]), EXIT_USAGE);
    assert_eq!(run_cli(["chd", "volume", "--samples", "10"]), EXIT_USAGE);
    assert_eq!(run_cli(["chd", "duality", "--config", "/nonexistent/config.json"]), EXIT_USAGE);
    assert_eq!(run_cli(["chd", "verify", "darboux", "--mu", "-1"]), EXIT_USAGE);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, r#"{"domain": "chn", "n": 2, "mu": [1.0], "points": 10, "format": "csv"}"#).unwrap();
    let code = run_cli([
        "chd", "verify", "equivariance", "--config", cfg.to_str().unwrap(), "--points", "12", "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_PASS);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let names: Vec<String> = rows.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert!(names.contains(&"xi_map".to_string()));
    assert!(text.contains(r#""points"":12"#));
}

#[test]
fn binary_reads_seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let status = chd()
        .args(["verify", "darboux", "--points", "3", "-o", out.to_str().unwrap()])
        .env("CHD_SEED", "1234")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_PASS));
    assert_eq!(read_report(&out).config.seed, 1234);

    let status = chd()
        .args(["verify", "darboux", "--points", "3", "--seed", "5", "-o", out.to_str().unwrap()])
        .env("CHD_SEED", "1234")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_PASS));
    assert_eq!(read_report(&out).config.seed, 5);
}

#[test]
fn binary_prints_json_to_stdout() {
    let output = chd().args(["duality", "--domain", "chn", "--n", "2"]).output().unwrap();
    assert_eq!(output.status.code(), Some(EXIT_PASS));
    let r: Report = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(r.checks.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["duality_root", "gennaio_check"]);
}
