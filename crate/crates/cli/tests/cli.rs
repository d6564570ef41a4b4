//! Exit-code contract and determinism of the command-line front end.

use std::process::Command;

fn cosym() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cosym"))
}

#[test]
fn passing_verify_exits_zero() {
    let out = cosym()
        .args(["verify", "--builtin", "flat-cokahler-r3", "--samples", "100", "--seed", "7"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"pass\":true"));
}

#[test]
fn failing_check_exits_two() {
    let out = cosym()
        .args(["verify", "--builtin", "contact-r3", "--samples", "60"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error_exit_one() {
    let out = cosym()
        .args(["list-builtins", "--no-such-flag"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_builtin_is_config_error_exit_one() {
    let out = cosym()
        .args(["verify", "--builtin", "no-such-fixture"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn list_builtins_has_at_least_eight_fixtures() {
    let out = cosym().arg("list-builtins").output().expect("spawn");
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().count() >= 8);
    // machine-readable variant
    let json_out = cosym().args(["list-builtins", "--json"]).output().expect("spawn");
    let text = String::from_utf8(json_out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(text.trim()).expect("valid json");
    assert!(parsed.as_array().unwrap().len() >= 8);
}

#[test]
fn same_seed_reports_are_byte_identical() {
    let run = || {
        cosym()
            .args(["verify", "--builtin", "flat-kahler-c2", "--samples", "80", "--seed", "11"])
            .output()
            .expect("spawn")
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn env_seed_overrides_flag() {
    let with_flag = cosym()
        .args(["verify", "--builtin", "flat-kahler-r2", "--samples", "50", "--seed", "3"])
        .output()
        .expect("spawn");
    let with_env = cosym()
        .args(["verify", "--builtin", "flat-kahler-r2", "--samples", "50", "--seed", "99"])
        .env("COSYM_SEED", "3")
        .output()
        .expect("spawn");
    assert_eq!(with_flag.stdout, with_env.stdout);
}

#[test]
fn scenario_file_roundtrip() {
    let dir = std::env::temp_dir().join(format!("cosym-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let scenario = dir.join("s1.json");
    std::fs::write(
        &scenario,
        r#"{
            "kind": "verify",
            "builtin": "canonical-r5",
            "sampling": {"count": 80, "seed": 5}
        }"#,
    )
    .unwrap();
    let report_path = dir.join("report.json");
    let out = cosym()
        .args([
            "verify",
            "--scenario",
            scenario.to_str().unwrap(),
            "--out",
            report_path.to_str().unwrap(),
        ])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(&report_path).unwrap();
    assert!(report.contains("\"pass\":true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_scenario_exits_one() {
    let dir = std::env::temp_dir().join(format!("cosym-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let scenario = dir.join("bad.json");
    std::fs::write(&scenario, "{\"kind\": \"verify\"").unwrap();
    let out = cosym()
        .args(["verify", "--scenario", scenario.to_str().unwrap()])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn flow_writes_csv_next_to_report() {
    let dir = std::env::temp_dir().join(format!("cosym-flow-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report_path = dir.join("flow.json");
    let out = cosym()
        .args([
            "flow",
            "--builtin",
            "harmonic-oscillator",
            "--T",
            "1.0",
            "--h",
            "0.01",
            "--out",
            report_path.to_str().unwrap(),
        ])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("flow.csv")).unwrap();
    assert!(csv.starts_with("time,p,q,t,H"));
    std::fs::remove_dir_all(&dir).ok();
}
