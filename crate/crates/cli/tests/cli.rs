//! End-to-end checks of the `molring` binary.

use std::process::Command;

fn molring() -> Command {
    Command::new(env!("CARGO_BIN_EXE_molring"))
}

fn write_config(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_manifest_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ct.json", r#"{"scenario":"coupling_table","separations":[0.025]}"#);
    let out = dir.path().join("out");
    let status = molring().arg("run").arg(&cfg).arg("--out-dir").arg(&out).arg("--threads").arg("2").output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"][0]["path"], "couplings.csv");
    assert_eq!(manifest["files"][0]["columns"][1], "omega_12");
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "dd.json",
        r#"{"scenario":"dicke_decay","n":2,"d":0.2,"lambda":0.0,"seed":1,
            "t_grid":{"t_final":0.1,"n_times":3},"disorder":{"sigma":0.01,"realizations":2,"seed":5}}"#,
    );
    let out = dir.path().join("out");
    let status = molring().arg("run").arg(&cfg).arg("--out-dir").arg(&out).arg("--seed").arg("42").output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 42);
    assert_eq!(manifest["diagnostics"]["realization_seeds"][1]["seed"], 42);
}

#[test]
fn validate_prints_defaults_and_rejects_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "g.json", r#"{"scenario":"dicke_decay","n":4,"d":0.04,"lambda":0.15}"#);
    let out = molring().arg("validate").arg(&good).output().unwrap();
    assert!(out.status.success());
    let echoed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(echoed["tolerances"]["atol"], 1e-10);

    let bad = write_config(dir.path(), "b.json", r#"{"scenario":"dicke_decay","n":4,"d":-0.04,"lambda":0.15}"#);
    let out = molring().arg("validate").arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dicke_decay.d"));
}

#[test]
fn list_and_version_verbs() {
    let out = molring().arg("list-scenarios").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for name in
        ["dicke_decay", "pulsed_ring", "dispersion", "dimer_transfer", "ring_absorption", "nanoring_laser", "coupling_table"]
    {
        assert!(text.contains(name), "{name} missing");
    }
    let out = molring().arg("version").output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("molring "));
}
