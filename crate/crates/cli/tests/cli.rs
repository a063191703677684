use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tomflow::output::parse_numeric_csv;
use tomflow_cli::{parse_scenario_str, run, CliError, Kind};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn tomflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_example(name: &str, out: &Path) -> Output {
    let cfg = examples().join(format!("{name}.toml"));
    let text = fs::read_to_string(&cfg).unwrap();
    let kind = parse_scenario_str(&text).unwrap().kind;
    tomflow(&[kind.name(), "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

const MINIMAL: &str = r#"
kind = "riemann"

[model]
q = { kind = "power", exponent = 1 }
h = { kind = "power", exponent = 1 }

[initial]
left = { rho = 0.8, v = 0.2, h = 0.7 }
right = { rho = 0.1, v = 0.5, h = 0.03 }
"#;

#[test]
fn normalized_round_trip() {
    for entry in fs::read_dir(examples()).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        let sc = parse_scenario_str(&text).unwrap();
        let again = parse_scenario_str(&sc.to_normalized()).unwrap();
        assert_eq!(sc, again);
        assert_eq!(sc.to_normalized(), again.to_normalized());
    }
}

#[test]
fn missing_closure_names_the_key() {
    let text = MINIMAL.replace("q = { kind = \"power\", exponent = 1 }\n", "");
    let err = parse_scenario_str(&text).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("`q`"), "{err}");
}

#[test]
fn invalid_closure_names_the_field() {
    let text = MINIMAL.replace("exponent = 1 }\nh", "exponent = -1 }\nh");
    match parse_scenario_str(&text).unwrap_err() {
        CliError::Validation { field, .. } => assert_eq!(field, "model.q"),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn parse_error_reports_line() {
    let text = MINIMAL.replace("rho = 0.1,", "rho = 0.1, bogus = 3,");
    match parse_scenario_str(&text).unwrap_err() {
        CliError::Parse { line, message } => {
            assert_eq!(line, Some(10), "{message}");
            assert!(message.contains("bogus"), "{message}");
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn unknown_kind_is_a_parse_error() {
    let err = parse_scenario_str(&MINIMAL.replace("\"riemann\"", "\"lattice\"")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn fig1_profile_has_fan() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_example("fig1", dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = fs::read_to_string(dir.path().join("riemann_t0.3.csv")).unwrap();
    assert!(body.starts_with("x,rho,v,h,lambda1,region\n"));
    for label in ["L", "FAN", "MID", "R"] {
        assert!(body.lines().any(|l| l.ends_with(&format!(",{label}"))), "{label}");
    }
    let meta = fs::read_to_string(dir.path().join("meta.txt")).unwrap();
    assert!(meta.contains("wave1 = rarefaction"));
    assert!(meta.contains("config_sha256 = "));
}

#[test]
fn fig2_delta_v_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_example("fig2", dir.path()).status.success());
    let (header, rows) = parse_numeric_csv(&fs::read_to_string(dir.path().join("delta_v.csv")).unwrap()).unwrap();
    assert_eq!(header, ["x", "v", "v_ar", "delta_v"]);
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| r[3].abs() <= 1e-10));
}

#[test]
fn fig3_delta_v_is_visible() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_example("fig3", dir.path()).status.success());
    let (_, rows) = parse_numeric_csv(&fs::read_to_string(dir.path().join("delta_v.csv")).unwrap()).unwrap();
    let max = rows.iter().map(|r| r[3].abs()).fold(0.0, f64::max);
    assert!(max > 1e-4, "{max}");
}

#[test]
fn nonpositive_eps_rejected_without_output() {
    let text = fs::read_to_string(examples().join("sweep.toml"))
        .unwrap()
        .replace("eps_list = [0.04, 0.02, 0.01]", "eps_list = [0.04, 0.0]");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = tomflow(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error kind=validation code=3"), "{stderr}");
    assert!(stderr.contains("numerics.eps_list"), "{stderr}");
    assert!(!out_dir.exists());
}

#[test]
fn kind_mismatch_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = examples().join("fig1.toml");
    let out = tomflow(&["fvm", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_config_file_is_io_error() {
    let out = tomflow(&["riemann", "--config", "/nonexistent/scenario.toml", "--out", "/tmp"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn check_prints_normalized_scenario() {
    let cfg = examples().join("fig4.toml");
    let out = tomflow(&["check", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let sc = parse_scenario_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(sc.kind, Kind::Riemann);
}

#[test]
fn runs_are_deterministic() {
    for name in ["fig1", "fvm", "sweep"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert!(run_example(name, a.path()).status.success());
        assert!(run_example(name, b.path()).status.success());
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for n in names {
            assert_eq!(
                fs::read(a.path().join(&n)).unwrap(),
                fs::read(b.path().join(&n)).unwrap(),
                "{name}/{n:?}"
            );
        }
    }
}

#[test]
fn every_example_runs() {
    for entry in fs::read_dir(examples()).unwrap() {
        let path = entry.unwrap().path();
        let sc = parse_scenario_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let art = run(&sc).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!art.files.is_empty());
        for (name, body) in &art.files {
            assert!(name.ends_with(".csv"));
            assert!(!body.contains("nan,nan,nan"), "{name}");
        }
    }
}

#[test]
fn micro_error_shrinks_with_vehicles() {
    let text = fs::read_to_string(examples().join("micro.toml")).unwrap();
    let art = run(&parse_scenario_str(&text).unwrap()).unwrap();
    let body = &art.files.iter().find(|(n, _)| n == "micro_error.csv").unwrap().1;
    let (_, rows) = parse_numeric_csv(body).unwrap();
    let l1: Vec<f64> = rows.iter().map(|r| r[3] + r[4]).collect();
    assert!(l1.windows(2).all(|w| w[1] < w[0]), "{l1:?}");
}
