use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn floerkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floerkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_fixture(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec!["fixtures", name];
    args.extend_from_slice(extra);
    let o = floerkit(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.join(format!("{name}.spec"));
    std::fs::write(&path, &o.stdout).unwrap();
    path
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("machine output is json")
}

#[test]
fn lists_fixtures() {
    let o = floerkit(&["fixtures"]);
    assert!(o.status.success());
    let names = stdout(&o);
    for n in [
        "torus-exterior",
        "maslov2-pair",
        "maslov0-obstructed",
        "heisenberg",
    ] {
        assert!(names.lines().any(|l| l == n), "{n}");
    }
}

#[test]
fn check_passes_on_every_fixture_pair() {
    let dir = TempDir::new().unwrap();
    for name in [
        "torus-exterior",
        "maslov2-pair",
        "maslov0-obstructed",
        "maslov2-triple",
        "maslov0-pair",
    ] {
        let spec = write_fixture(dir.path(), name, &["--pair", "--seed", "11"]);
        let o = floerkit(&["check", spec.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}\n{}", stdout(&o));
        assert!(stdout(&o).contains("PASS m_prime.ainfty"));
    }
}

#[test]
fn machine_output_is_deterministic_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let spec = write_fixture(dir.path(), "maslov2-pair", &["--pair", "--seed", "4"]);
    let run = || {
        let mut v = json(&floerkit(&[
            "potential",
            spec.to_str().unwrap(),
            "--format",
            "machine",
        ]));
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a["facts"]["properly-unobstructed"], "true");
    assert_eq!(a["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn seeded_pairs_are_reproducible() {
    let a = floerkit(&["fixtures", "maslov0-pair", "--pair", "--seed", "9"]);
    let b = floerkit(&["fixtures", "maslov0-pair", "--pair", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("seed = 9"));
}

#[test]
fn obstructed_fixture_reports_a_witness() {
    let dir = TempDir::new().unwrap();
    let spec = write_fixture(dir.path(), "maslov0-obstructed", &[]);
    let v = json(&floerkit(&[
        "potential",
        spec.to_str().unwrap(),
        "--format",
        "machine",
    ]));
    assert_eq!(v["facts"]["properly-unobstructed"], "false");
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn wallcross_on_a_transported_pair() {
    let dir = TempDir::new().unwrap();
    let spec = write_fixture(dir.path(), "maslov0-pair", &["--pair", "--seed", "21"]);
    let o = floerkit(&[
        "wallcross",
        spec.to_str().unwrap(),
        "--map",
        "u",
        "--source",
        "m_prime",
        "--target",
        "m",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS wall-crossing.potential"));
    let o = floerkit(&[
        "wallcross",
        spec.to_str().unwrap(),
        "--map",
        "u",
        "--source",
        "m",
        "--target",
        "m_prime",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL homomorphism"));
    let o = floerkit(&["wallcross", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn minimize_chain_models() {
    let dir = TempDir::new().unwrap();
    for name in ["heisenberg", "acyclic-extension"] {
        let spec = write_fixture(dir.path(), name, &[]);
        let o = floerkit(&["minimize", spec.to_str().unwrap(), "--isotopy", "M"]);
        assert_eq!(o.status.code(), Some(0), "{name}\n{}", stdout(&o));
        let out = stdout(&o);
        assert!(out.contains("PASS family.pseudo-isotopy"));
        let model = out
            .split("--- minimal model\n")
            .nth(1)
            .unwrap()
            .split("result:")
            .next()
            .unwrap();
        let reparsed = dir.path().join(format!("{name}-min.spec"));
        std::fs::write(&reparsed, model).unwrap();
        let o = floerkit(&["check", reparsed.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
}

#[test]
fn continuation_plan_and_inadmissible_steps() {
    let dir = TempDir::new().unwrap();
    let spec = write_fixture(dir.path(), "maslov2-pair", &[]);
    let o = floerkit(&["continue", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("step2.unobstructed: true"));
    let text =
        std::fs::read_to_string(&spec)
            .unwrap()
            .replacen("step xi=1/8,0 ", "step xi=7/8,0 ", 1);
    std::fs::write(&spec, text).unwrap();
    let o = floerkit(&["continue", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL admissibility"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "[context]\ncutoff = x\n").unwrap();
    let o = floerkit(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(
        floerkit(&["check", dir.path().join("missing").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(floerkit(&["fixtures", "nope"]).status.code(), Some(2));
    let spec = write_fixture(dir.path(), "maslov2-pair", &[]);
    assert_eq!(
        floerkit(&["minimize", spec.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cutoff_flag_overrides_the_spec() {
    let dir = TempDir::new().unwrap();
    let spec = write_fixture(dir.path(), "maslov2-pair", &[]);
    let v = json(&floerkit(&[
        "potential",
        spec.to_str().unwrap(),
        "--cutoff",
        "2",
        "--format",
        "machine",
    ]));
    assert_eq!(v["facts"]["precision"], "3");
}
