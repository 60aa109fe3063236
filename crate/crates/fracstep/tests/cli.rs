use std::path::Path;
use std::process::{Command, Output};

use fracstep::config::Scenario;
use fracstep::runner::run_scenario;
use fracstep::CliError;

const COMMUTATION: &str = r#"
schema = 1
name = "commutation"

[model]
id = "scalar_rosenau"

[datum]
kind = "bump"
a = -1.0
b = 1.0
value = 0.5

[schedule]
t = 0.1
eps = 1e-3
n = 4

[[diagnostics]]
kind = "commutation"
t_list = [0.1, 0.05, 0.025, 0.0125, 0.00625]
"#;

const RANDOM: &str = r#"
schema = 1
name = "random"
seed = 11

[model]
id = "scalar_rosenau"

[datum]
kind = "random"
jumps = 6
amplitude = 0.8
half_width = 2.0

[schedule]
t = 0.2
s = 0.05
eps = 1e-2
n = 4

[[diagnostics]]
kind = "trace"

[[diagnostics]]
kind = "rescaling"
lambdas = [0.5, 2.0]
"#;

const EMPTY: &str = r#"
schema = 1
name = "empty"

[model]
id = "scalar_rosenau"
source = "zero"

[datum]
kind = "riemann"
left = 1.0
right = 0.0
width = 1.0

[schedule]
t = 0.1
eps = 1e-2
n = 4
"#;

fn fracstep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracstep"))
        .args(args)
        .env_remove("FRACSTEP_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_scenario(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn empty_diagnostics_write_only_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), EMPTY);
    let out = dir.path().join("out");
    let o = fracstep(&[
        "run",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let names: Vec<String> = files(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["summary.json"]);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["diagnostics"].as_array().unwrap().len(), 0);
}

#[test]
fn commutation_scenario_reports_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), COMMUTATION);
    let out = dir.path().join("out");
    let o = fracstep(&[
        "run",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("00_commutation.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "s,t,distance,slope,bound,pass");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let slope: f64 = rows[0][3].parse().unwrap();
    assert!(slope >= 1.9, "slope {slope}");
    assert!(rows.iter().all(|r| r[5] == "true"));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    let check = &summary["diagnostics"][0]["checks"][0];
    assert_eq!(check["bound"], "slope >= 1.9");
    assert_eq!(check["value"].as_f64().unwrap(), slope);
    assert_eq!(summary["pass"], true);
    let keys: Vec<&String> = summary.as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        [
            "schema",
            "scenario",
            "model",
            "seed",
            "pass",
            "constants",
            "diagnostics"
        ]
    );
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = COMMUTATION.replace("t_list = ", "min_slope = 5.0\nt_list = ");
    let path = write_scenario(dir.path(), &text);
    let out = dir.path().join("out");
    let o = fracstep(&[
        "run",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), RANDOM);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "3")] {
        let o = fracstep(&[
            "run",
            path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), 4);
    assert_eq!(fa, fb);
}

#[test]
fn different_seed_changes_the_datum() {
    let a = run_scenario(&Scenario::parse(RANDOM, Path::new("a.toml")).unwrap(), 1).unwrap();
    let other = RANDOM.replace("seed = 11", "seed = 12");
    let b = run_scenario(&Scenario::parse(&other, Path::new("b.toml")).unwrap(), 1).unwrap();
    assert_ne!(a.files[0].1, b.files[0].1);
}

#[test]
fn output_dir_defaults_next_to_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), EMPTY);
    let o = fracstep(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("out/empty/summary.json").exists());
    let env_out = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_fracstep"))
        .args(["run", path.to_str().unwrap()])
        .env("FRACSTEP_OUT", &env_out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(env_out.join("summary.json").exists());
}

#[test]
fn list_models_has_the_registered_ids() {
    let o = fracstep(&["list", "models"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in [
        "radiating_gas",
        "rosenau",
        "scalar_rosenau",
        "local",
        "nonautonomous",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(id)),
            "{id} missing from {text}"
        );
    }
    let o = fracstep(&["list", "diagnostics"]);
    let text = stdout(&o);
    for id in [
        "trace",
        "limit",
        "commutation",
        "tangent",
        "sensitivity",
        "characterization",
        "entropy",
        "rescaling",
    ] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}

#[test]
fn describe_scalar_rosenau_shows_constants() {
    let o = fracstep(&["describe", "scalar_rosenau"]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("L1 = 2, L2 = 2, L3 = 0"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn describe_unknown_suggests() {
    let o = fracstep(&["describe", "scalar_rosenou"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("did you mean 'scalar_rosenau'"),
        "{}",
        stderr(&o)
    );
    let o = fracstep(&["list", "model"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("models"));
}

#[test]
fn parse_errors_name_line_and_field() {
    let text = COMMUTATION.replace("eps = 1e-3", "eps = \"small\"");
    let err = Scenario::parse(&text, Path::new("bad.toml")).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, CliError::Config { .. }));
    assert!(msg.contains("bad.toml"), "{msg}");
    assert!(msg.contains("line 16"), "{msg}");
    assert!(msg.contains("eps"), "{msg}");

    let text = COMMUTATION.replace("n = 4", "n = 4\nstep = 0.1");
    let msg = Scenario::parse(&text, Path::new("bad.toml"))
        .unwrap_err()
        .to_string();
    assert!(msg.contains("step"), "{msg}");

    let text = COMMUTATION.replace("kind = \"commutation\"", "kind = \"commute\"");
    let msg = Scenario::parse(&text, Path::new("bad.toml"))
        .unwrap_err()
        .to_string();
    assert!(msg.contains("commute"), "{msg}");
}

#[test]
fn unknown_model_is_reported_with_suggestion() {
    let text = COMMUTATION.replace("scalar_rosenau", "scalar_rosenaw");
    let sc = Scenario::parse(&text, Path::new("x.toml")).unwrap();
    let msg = run_scenario(&sc, 1).unwrap_err().to_string();
    assert!(msg.contains("did you mean 'scalar_rosenau'"), "{msg}");
}

#[test]
fn domain_failures_carry_the_diagnostic() {
    let text = RANDOM.replace("n = 4", "n = 4\ndelta = 0.01\nc = 0.01");
    let sc = Scenario::parse(&text, Path::new("x.toml")).unwrap();
    let err = run_scenario(&sc, 1).unwrap_err();
    assert!(
        matches!(err, CliError::Diagnostic { index: 0, .. }),
        "{err}"
    );
    assert!(err.to_string().contains("trace"));
}

#[test]
fn steps_datum_needs_matching_lengths() {
    let text = COMMUTATION.replace(
        "kind = \"bump\"\na = -1.0\nb = 1.0\nvalue = 0.5",
        "kind = \"steps\"\nbreaks = [0.0, 1.0]\nvalues = [1.0, 2.0]",
    );
    let sc = Scenario::parse(&text, Path::new("x.toml")).unwrap();
    assert!(matches!(run_scenario(&sc, 1), Err(CliError::Format(_))));
}

#[test]
fn shipped_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let sc = Scenario::load(&path).unwrap_or_else(|e| panic!("{e}"));
            fracstep::registry::build_model(&sc.model).unwrap();
            count += 1;
        }
    }
    assert!(count >= 5);
}

#[test]
fn summary_reports_the_ode_horizon() {
    let text = EMPTY
        .replace("source = \"zero\"\n", "")
        .replace("n = 4", "n = 4\ndelta = 2.0\nc = 2.0\ndelta0 = 3.0");
    let out = run_scenario(&Scenario::parse(&text, Path::new("x.toml")).unwrap(), 1).unwrap();
    // min((δ₀ − δ)/(δ₀L₂ + L₃), 1/(L₁ + 1)) with L₁ = L₂ = 2, L₃ = 0
    assert_eq!(out.summary.constants.ode_horizon, Some(1.0 / 6.0));
    assert_eq!(out.summary.constants.c0, 1.0);
    let none = run_scenario(&Scenario::parse(EMPTY, Path::new("x.toml")).unwrap(), 1).unwrap();
    assert_eq!(none.summary.constants.ode_horizon, None);
    let bad = EMPTY.replace("n = 4", "n = 4\ndelta0 = 3.0");
    assert!(Scenario::parse(&bad, Path::new("x.toml")).is_err());
}
