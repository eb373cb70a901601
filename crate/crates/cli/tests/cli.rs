use std::process::{Command, Output};

fn lndkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lndkit")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scenario_file(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lndkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn bundled_scenarios_exit_codes() {
    assert_eq!(lndkit(&["run", "makar-limanov"]).status.code(), Some(0));
    assert_eq!(lndkit(&["run", "slide-plane"]).status.code(), Some(0));
    let out = lndkit(&["run", "danielewski-note"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("NotFactorial"));
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let out = lndkit(&["validate", "no-such-scenario"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("makar-limanov"));
}

#[test]
fn malformed_scenario_file_is_a_usage_error() {
    let path = scenario_file("broken.scn", "ring { vars = [x, y] }\nderivation D = \"d/dx +\"\n");
    let out = lndkit(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn probe_question_requires_experimental() {
    let out = lndkit(&["probe-question", "makar-limanov", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lndkit(&["--experimental", "probe-question", "makar-limanov", "--alpha", "0"]);
    assert!(stdout(&out).contains("experimental"), "{}", stdout(&out));
}

#[test]
fn machine_output_is_json() {
    let out = lndkit(&["--output", "machine", "fibers", "makar-limanov"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["scenario"], "makar-limanov");
    assert_eq!(v["entries"][0]["command"], "fibers");
    assert_eq!(v["entries"][0]["status"], "ok");
}

#[test]
fn fiber_chart_text() {
    let out = lndkit(&["fiber-chart", "makar-limanov", "--alpha", "1", "--queries", "y"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("S2^3 - S1^2 - 1"), "{}", stdout(&out));
}

#[test]
fn degenerate_fiber_chart_is_a_verdict() {
    let out = lndkit(&["fiber-chart", "makar-limanov", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("DegenerateFiber"));
}

#[test]
fn dependency_verification() {
    let ok = lndkit(&["certify-dependence", "makar-limanov", "--alpha", "0", "--coefficients", "3*t^2; -2*z"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = lndkit(&["certify-dependence", "makar-limanov", "--alpha", "0", "--coefficients", "1; 1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("NotADependency"));
}

#[test]
fn custom_scenario_file() {
    let path = scenario_file(
        "plane.scn",
        "name = plane\nring { vars = [a, b] }\nderivation D = \"d/da\"\nrun validate\nrun exp\n",
    );
    let out = lndkit(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("scenario plane"));
}
