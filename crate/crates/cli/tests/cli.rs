use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morsecert"))
        .args(args)
        .env_remove("MORSECERT_WORKERS")
        .output()
        .expect("morsecert runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn export(dir: &Path) {
    let out = run(&["info", "p6", "--export", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

fn generic(dir: &Path, mode: &str, extra: &[&str]) -> Output {
    let path = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let (p, m, s) = (path("polytope.json"), path("moves.json"), path("state.json"));
    let mut args = vec!["certify", "generic", "--polytope", &p, "--moves", &m, "--state", &s, "--mode", mode];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn p5_certifies_with_exit_zero() {
    let out = run(&["certify", "p5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("P5: FIBRATION CERTIFIED (all links Regular)"), "{text}");
    assert!(text.contains("x 16 states"), "{text}");
}

#[test]
fn info_describes_p6() {
    let out = run(&["info", "p6"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("27 facets"), "{text}");
    assert!(text.contains("orbit size: 32"), "{text}");
}

#[test]
fn exported_inputs_certify_as_generic() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let report = dir.path().join("report.json");
    let out = generic(
        dir.path(),
        "perfect",
        &["--format", "structured", "--output", report.to_str().unwrap()],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["verify", report.to_str().unwrap(), "--format", "structured"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["consistent"], true);
    assert_eq!(doc["certified"], true);
    assert!(doc["replayed"].as_u64().unwrap() > 0);
}

#[test]
fn fibration_mode_on_p6_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let out = generic(dir.path(), "fibration", &[]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("CERTIFICATION FAILED"), "{text}");
    assert!(text.contains("first failure: verdicts"), "{text}");
}

#[test]
fn incompatible_state_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let path = dir.path().join("state.json");
    let mut state: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // facet 17 is "1", which shares a move with its neighbour "i"
    let flipped = if state["17"] == "O" { "I" } else { "O" };
    state.insert("17".into(), flipped.into());
    std::fs::write(&path, serde_json::to_string(&state).unwrap()).unwrap();
    let out = generic(dir.path(), "perfect", &[]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not compatible"), "{err}");
}

#[test]
fn missing_and_malformed_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    export(dir.path());
    std::fs::write(dir.path().join("moves.json"), "[[0, 1,").unwrap();
    let out = generic(dir.path(), "perfect", &[]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("moves.json"), "{err}");
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn bad_worker_variable_is_an_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_morsecert"))
        .args(["certify", "p5"])
        .env("MORSECERT_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_rejects_an_edited_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("p5.json");
    let out = run(&["certify", "p5", "--format", "structured", "--output", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    doc["euler"]["bad_vertices"] = 3.into();
    std::fs::write(&report, doc.to_string()).unwrap();
    let out = run(&["verify", report.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("problem: euler record differs"), "{text}");
}
