use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn sbmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbmc")).args(args).env_remove("SBMC_WORKERS").output().expect("run sbmc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn safety_holds_on_the_traffic_light() {
    let o = sbmc(&["check", path(&data("trafficlight.sbm")), "-f", path(&data("safety.mcf")), "--stats"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("holds: true\n"), "{out}");
    assert!(out.contains("states: 4\n") && out.contains("transitions: 6\n") && out.contains("equations: 18\n"), "{out}");

    let o = sbmc(&["check", path(&data("trafficlight.sbm")), "-f", path(&data("liveness.mcf"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "holds: true\n");
}

#[test]
fn mutant_fails_with_a_trace() {
    let o = sbmc(&["check", path(&data("trafficlight_mutant.sbm")), "-f", path(&data("safety.mcf")), "--trace"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "holds: false\ntrace (4 steps):\n  red_button\n  set_red\n  red_button\n  set_red\n");
}

#[test]
fn exports_are_identical_across_worker_counts_and_checkable() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.ltx");
    let eight = dir.path().join("eight.ltx");
    let o = sbmc(&["explore", path(&data("trafficlight.sbm")), "--workers", "1", "-o", one.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "states: 4\ntransitions: 6\ndeadlocks: 0\n");
    let o = sbmc(&["export", path(&data("trafficlight.sbm")), "--workers", "8", "-o", eight.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&one).unwrap(), fs::read(&eight).unwrap());

    let o = sbmc(&["check", one.to_str().unwrap(), "-f", path(&data("safety.mcf"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "holds: true\n");
}

#[test]
fn worker_count_comes_from_the_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_sbmc"))
            .args(["explore", path(&data("trafficlight.sbm"))])
            .env("SBMC_WORKERS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("3").status.code(), Some(0));
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn suite_reports_every_property_as_json() {
    let o = sbmc(&["suite", path(&data("default.scn")), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let records: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 15);
    for r in &records {
        assert_eq!(r["match"], true, "{r}");
        for key in ["id", "verdict", "expected", "states", "transitions", "equations", "millis"] {
            assert!(r.get(key).is_some(), "{key} missing in {r}");
        }
    }
    let verdict = |id: &str| records.iter().find(|r| r["id"] == id).unwrap()["verdict"].clone();
    assert_eq!(verdict("P6-naive"), false);
    assert_eq!(verdict("P9-dso"), false);
    assert_eq!(verdict("P10"), true);
}

#[test]
fn suite_table_skips_ito_properties_without_the_phase() {
    let o = sbmc(&["suite", path(&data("degraded.scn")), "--only", "P10,P13"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("P13") && l.contains("skipped")), "{out}");
    assert!(out.ends_with("2 properties, 0 mismatches\n"), "{out}");
}

#[test]
fn generated_model_parses() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("besw.sbm");
    let o = sbmc(&["gen", path(&data("degraded.scn")), "-o", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = sbmc(&["parse", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // The canonical form is a fixpoint of parse-and-print.
    let canonical = dir.path().join("canonical.sbm");
    fs::write(&canonical, &o.stdout).unwrap();
    let again = sbmc(&["parse", canonical.to_str().unwrap()]);
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn errors_map_to_exit_statuses() {
    assert_eq!(sbmc(&[]).status.code(), Some(2));
    assert_eq!(sbmc(&["check", path(&data("trafficlight.sbm"))]).status.code(), Some(2));
    let o = sbmc(&["parse", path(&data("safety.mcf"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("safety.mcf: 2:1"));
    assert_eq!(sbmc(&["parse", "no/such/file.sbm"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("bad.scn");
    fs::write(&scn, "failedPumps = dock0, dock1\n").unwrap();
    let o = sbmc(&["suite", scn.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed dock pumps"));

    let o = sbmc(&["explore", path(&data("trafficlight.sbm")), "--max-states", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = sbmc(&["suite", path(&data("default.scn")), "--max-states", "100"]);
    assert_eq!(o.status.code(), Some(3));
}
