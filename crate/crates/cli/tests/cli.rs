use std::path::Path;
use std::process::{Command, Output};

const CUBIC: &str = r#"{ "n": 1, "coords": [
  [[0.3, -1.2], [1.1, 0.4], [-0.7, 0.2], [0.5, 0.9]],
  [[1.4, 0.1], [-0.2, -0.8], [0.6, 1.3], [-1.0, 0.3]],
  [[-0.5, 0.7], [0.9, -0.6], [1.2, 0.05], [0.2, -1.1]],
  [[0.8, 0.6], [-1.3, 0.2], [-0.1, -0.9], [0.7, 0.4]]
] }"#;

fn frenet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frenet")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn twistor_then_energy_from_the_dump() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), CUBIC).unwrap();
    let o = frenet(&["twistor", "--curve", "c.json", "--grid", "64", "--tol-diff", "1.0"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("out/twistor.field").exists());
    let o = frenet(&["energy", "--field", "out/twistor.field", "--format", "json"], dir.path());
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["resolution"], 64);
    // A ≡ 0 for twistor projections, up to discretization error
    assert!(report["energy"].as_f64().unwrap().abs() < 0.1, "{report}");
}

#[test]
fn tight_tolerance_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), CUBIC).unwrap();
    let o = frenet(&["twistor", "--curve", "c.json", "--grid", "32", "--tol-diff", "1e-14"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn precondition_and_io_failures() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), CUBIC).unwrap();
    // a twistor field has no Willmore form
    let o = frenet(&["envelope", "--curve", "c.json", "--grid", "32"], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = frenet(&["twistor", "--curve", "missing.json"], dir.path());
    assert_eq!(code(&o), 4);
    std::fs::write(dir.path().join("bad.json"), r#"{ "curve": "c.json", "stages": [ { "op": "spin" } ] }"#).unwrap();
    let o = frenet(&["pipeline", "bad.json"], dir.path());
    assert_eq!(code(&o), 3);
    let o = frenet(&["twistor", "--grid"], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn pipeline_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), CUBIC).unwrap();
    let config = |out: &str| {
        format!(
            r#"{{ "curve": "c.json", "grid": 32, "seed": 5, "out": "{out}",
                 "stages": [ {{ "op": "twistor" }}, {{ "op": "energy", "refine": true }},
                             {{ "op": "stereographic", "pole": "auto" }}, {{ "op": "mesh", "file": "m.obj" }} ] }}"#
        )
    };
    std::fs::write(dir.path().join("a.json"), config("run_a")).unwrap();
    std::fs::write(dir.path().join("b.json"), config("run_b")).unwrap();
    frenet(&["pipeline", "a.json"], dir.path());
    frenet(&["pipeline", "b.json"], dir.path());
    let (a, b) = (files(&dir.path().join("run_a")), files(&dir.path().join("run_b")));
    assert!(a.len() >= 5);
    assert_eq!(a, b);
}
