use std::fs;
use std::process::{Command, Output};

use mafia_dynamics::Scenario;

fn mafia_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mafia-sim"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(mafia_sim(&["--help"]).status.code(), Some(0));
    assert_eq!(mafia_sim(&["--version"]).status.code(), Some(0));
    assert_eq!(mafia_sim(&["experiment", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two_with_one_line() {
    for args in [
        &["--bogus"][..],
        &["experiment"],
        &["experiment", "base", "--method", "leapfrog"],
        &["experiment", "base", "--dt", "-1"],
        &["run", "/nonexistent/scenario.toml"],
    ] {
        let o = mafia_sim(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert_eq!(stderr(&o).trim_end().lines().count(), 1, "{args:?}");
    }
}

#[test]
fn unknown_experiment_lists_valid_names() {
    let o = mafia_sim(&["experiment", "mafia-wins"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for name in [
        "base",
        "low-output",
        "productivity-shock",
        "eliminate-mafia",
        "no-bandits",
        "state-control",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn dumped_scenario_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = mafia_sim(&["experiment", "productivity-shock", "--dump-scenario"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let parsed = Scenario::from_toml(&text).unwrap();
    assert_eq!(
        parsed,
        mafia_dynamics::Experiment::ProductivityShock.scenario()
    );

    let path = dir.path().join("shock.toml");
    fs::write(&path, &text).unwrap();
    let out = dir.path().join("out");
    let o = mafia_sim(&[
        "run",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
        "--horizon",
        "200",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("productivity-shock.json")).unwrap())
            .unwrap();
    let samples = json["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 201);
    assert_eq!(samples.last().unwrap()["t"].as_f64(), Some(200.0));
    assert!(out.join("productivity-shock.svg").exists());
}

#[test]
fn invalid_scenario_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[parameters]\na_P = -3.0\n").unwrap();
    let o = mafia_sim(&["equilibrium", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn equilibrium_command_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("low.toml");
    let o = mafia_sim(&["experiment", "low-output", "--dump-scenario"]);
    fs::write(&path, o.stdout).unwrap();
    let o = mafia_sim(&[
        "equilibrium",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.contains("verdict: pass"));
    assert!(dir.path().join("low-output.equilibrium.txt").exists());
}

#[test]
fn loops_command_writes_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = mafia_sim(&[
        "loops",
        "--through",
        "Bandits",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("graph.csv")).unwrap();
    assert!(csv.starts_with("from,to,polarity,provenance"));
    assert!(fs::read_to_string(dir.path().join("graph.dot"))
        .unwrap()
        .starts_with("digraph"));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("loops through Bandits"));
    assert_eq!(
        mafia_sim(&["loops", "--through", "Nobody"]).status.code(),
        Some(2)
    );
}
