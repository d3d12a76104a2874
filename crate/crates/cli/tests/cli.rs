use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use curvemoduli::blowup::PhiMatrix;
use curvemoduli::fibration::MatrixA;
use curvemoduli::singularlocus::Normalization;
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/running_example")
}

fn cmd(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_curvemoduli"));
    c.args(args)
        .current_dir(fixtures())
        .env_remove("CURVEMODULI_SEED");
    c
}

fn output(args: &[&str]) -> Output {
    cmd(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> (String, Value) {
    let out = output(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap();
    (text, v)
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn hilbert_and_dims_output() {
    let (text, _) = ok_json(&["hilbert", "--degree", "3"]);
    assert_eq!(text.trim(), r#"{"a":3,"b":1}"#);
    let (text, _) = ok_json(&["dims", "--degree", "4"]);
    assert!(
        text.starts_with(r#"{"dim_X":26,"N":14,"dim_M":15,"codim_simpson":2"#),
        "{text}"
    );
}

#[test]
fn precondition_violations_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let zero_det = write(
        &dir,
        "zero.json",
        r#"{"d":3,"z1":{"degree":1,"terms":{"0,1,0":"1/1"}},"z2":{"degree":1,"terms":{"0,0,1":"1/1"}},
            "q1":{"degree":2,"terms":{}},"q2":{"degree":2,"terms":{}}}"#,
    );
    for args in [
        vec!["hilbert", "--degree", "2"],
        vec!["det", "--matrix", &zero_det],
        vec![
            "phi",
            "--matrix",
            "off_locus.json",
            "--vector",
            "b_xi0.json",
        ],
        vec!["phi", "--matrix", "swapped.json", "--vector", "b_xi0.json"],
        vec![
            "rbundle-eq",
            "--matrix",
            "matrix.json",
            "--v1",
            "b_zero.json",
            "--v2",
            "b_xi0.json",
        ],
        vec!["section", "--curve", "curve.json", "--point", "1,1,2"],
        vec![
            "tangent",
            "--matrix",
            "off_locus.json",
            "--vector",
            "b_xi0.json",
        ],
    ] {
        let out = output(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(&dir, "garbage.json", "{ not json");
    let bad_rational = write(
        &dir,
        "bad.json",
        r#"{"d":3,"z1":{"degree":1,"terms":{"0,1,0":"one"}},"z2":{"degree":1,"terms":{}},
            "q1":{"degree":2,"terms":{}},"q2":{"degree":2,"terms":{}}}"#,
    );
    let missing = dir.path().join("missing.json");
    for args in [
        vec!["det", "--matrix", &garbage],
        vec!["det", "--matrix", &bad_rational],
        vec!["det", "--matrix", missing.to_str().unwrap()],
        vec!["section", "--curve", "curve.json", "--point", "1,0"],
        vec!["check", "--suite", "bogus", "--degree", "3"],
        vec!["instances", "--kind", "bogus", "--degree", "3"],
        vec!["hilbert"],
        vec!["frobnicate"],
    ] {
        assert_eq!(output(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn seed_environment_variable_overrides_flag() {
    let out = cmd(&[
        "check", "--suite", "blowup", "--degree", "3", "--seed", "1", "--trials", "3",
    ])
    .env("CURVEMODULI_SEED", "99")
    .output()
    .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 99);

    let out = cmd(&[
        "check", "--suite", "blowup", "--degree", "3", "--trials", "3",
    ])
    .env("CURVEMODULI_SEED", "banana")
    .output()
    .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn instances_are_byte_identical_per_seed() {
    for kind in ["X", "Xprime", "tangent", "normal"] {
        let args = [
            "instances",
            "--kind",
            kind,
            "--degree",
            "3",
            "--seed",
            "4",
            "--count",
            "5",
        ];
        let (a, v) = ok_json(&args);
        let (b, _) = ok_json(&args);
        assert_eq!(a, b);
        assert_eq!(v.as_array().unwrap().len(), 5);
    }
    let (a, _) = ok_json(&["instances", "--kind", "X", "--degree", "3", "--seed", "4"]);
    let (b, _) = ok_json(&["instances", "--kind", "X", "--degree", "3", "--seed", "5"]);
    assert_ne!(a, b);
}

#[test]
fn emitted_json_reparses() {
    let (text, _) = ok_json(&["normalize", "--matrix", "shifted.json"]);
    let n: Normalization = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&n).unwrap(), text.trim());

    let (text, _) = ok_json(&["phi", "--matrix", "matrix.json", "--vector", "b_xi0.json"]);
    let p: PhiMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&p).unwrap(), text.trim());

    let (text, _) = ok_json(&[
        "section",
        "--curve",
        "curve_shifted.json",
        "--point",
        "1:1:1",
    ]);
    let a: MatrixA = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), text.trim());

    // the section output is itself a valid matrix file
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "section.json", &text);
    let (_, nu) = ok_json(&["nu", "--matrix", &path]);
    assert_eq!(nu["point"], serde_json::json!(["1/1", "1/1", "1/1"]));
}

#[test]
fn check_all_reports_every_suite() {
    let (_, v) = ok_json(&[
        "check", "--suite", "all", "--degree", "3", "--seed", "7", "--trials", "5",
    ]);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), curvemoduli::suite::SUITES.len());
    assert!(reports
        .iter()
        .all(|r| r["failures"].as_array().unwrap().is_empty()));
}

#[test]
fn reference_equivalence_check() {
    let (_, v) = ok_json(&[
        "check",
        "--suite",
        "rbundle-equiv",
        "--degree",
        "3",
        "--seed",
        "7",
        "--trials",
        "100",
    ]);
    assert_eq!(v["failures"], serde_json::json!([]));
    assert_eq!(v["trials"], 100);
}
