use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn majority(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majority"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn check_closed_counterexample_fails_with_witness() {
    let o = majority(&[
        "check-closed",
        &data("counterexample.rel"),
        "majority",
        "--json",
        "--verify-witness",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["verdict"]["closed"], false);
    assert_eq!(
        v["witnesses"][0]["conclusion"],
        serde_json::json!([0, 1, 0])
    );
    assert_eq!(v["witnesses"][0]["kind"], "closure-violation");
    assert_eq!(v["audit"], true);
    assert_eq!(v["inputs"].as_object().unwrap().len(), 2);
}

#[test]
fn check_closed_diagonal_holds() {
    let o = majority(&["check-closed", &data("diagonal.rel"), "maltsev"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("strictly closed: yes"));
}

#[test]
fn check_closed_arity_mismatch_is_input_error() {
    let o = majority(&["check-closed", &data("diagonal.rel"), "majority"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("arity"));
}

#[test]
fn matrix_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "matrix 2 4\nx1 x1 x2 | x2\ny2 y1 y1 | y2\n").unwrap();
    let o = majority(&[
        "check-closed",
        &data("diagonal.rel"),
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = majority(&["check-closed", &data("diagonal.rel"), "no-such-matrix"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn classify_counterexample() {
    let o = majority(&[
        "classify",
        &data("counterexample.rel"),
        "--json",
        "--verify-witness",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(
        v["verdict"],
        serde_json::json!({"maltsev": true, "majority": false})
    );
    assert_eq!(
        v["witnesses"][0]["premises"],
        serde_json::json!([[1, 0, 0], [1, 1, 0], [0, 1, 0]])
    );
    assert_eq!(v["audit"], true);
}

#[test]
fn classify_accepts_json_structures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"{"universe": 2, "relations": {"E": {"arity": 2, "tuples": [[0, 1]]}}}"#,
    )
    .unwrap();
    let o = majority(&["classify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn parse_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.rel");
    std::fs::write(&path, "universe 2\nrel R 2\n0 5\nend\n").unwrap();
    let o = majority(&["classify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("line 3, column 3"), "{err}");
}

#[test]
fn coreflect_output_is_a_maltsev_object() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.rel");
    let out = dir.path().join("out.rel");
    std::fs::write(&input, "universe 2\nrel R 2\n0 0\n0 1\n1 1\nend\n").unwrap();
    let o = majority(&["coreflect", input.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&out).unwrap();
    let s = majority::structures::parse_structure(&written).unwrap();
    assert!(majority::relobjects::is_maltsev_object(&s).unwrap().holds);
    assert_eq!(s.sole_relation().unwrap().1.len(), 4);
}

#[test]
fn poly_outcomes() {
    let o = majority(&["poly", &data("chain2.rel"), "majority", "--verify-witness"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("witness audit: ok"));
    let o = majority(&["poly", &data("counterexample.rel"), "majority"]);
    assert_eq!(o.status.code(), Some(1));
    let o = majority(&["poly", &data("chain2.rel"), "maltsev"]);
    assert_eq!(o.status.code(), Some(1));
    let o = majority(&["poly", &data("diagonal.rel"), "majority", "--budget", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn term_outcomes() {
    assert_eq!(
        majority(&["terms", &data("lattice2.alg"), "majority"])
            .status
            .code(),
        Some(0)
    );
    let o = majority(&["terms", &data("semilattice2.alg"), "majority", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verdict"]["clone_size"], 7);
    assert_eq!(
        majority(&["terms", &data("z2.alg"), "maltsev"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        majority(&["terms", &data("z4.alg"), "majority", "--budget", "5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn congruences_with_checks() {
    let o = majority(&["congruences", &data("z4.alg"), "--checks"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("distributive ✓ permutable ✓"), "{text}");
    assert!(text.contains("{0,2}{1,3}"));
    // M3 is simple
    let o = majority(&["congruences", &data("m3.alg")]);
    assert!(stdout(&o).starts_with("2 congruences"));
    // a bare 3-element set: every partition, lattice M3, neither law holds
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set3.alg");
    std::fs::write(&path, "universe 3\n").unwrap();
    let o = majority(&[
        "congruences",
        path.to_str().unwrap(),
        "--checks",
        "--verify-witness",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("distributive ✗ permutable ✗"), "{text}");
    assert_eq!(text.matches("witness audit: ok").count(), 2, "{text}");
}

#[test]
fn commutative_majority_counts() {
    let o = majority(&["commutative-majority", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "none (729 candidates)");
    assert_eq!(
        majority(&["commutative-majority", "1"]).status.code(),
        Some(0)
    );
    assert_eq!(
        majority(&["commutative-majority", "7"]).status.code(),
        Some(3)
    );
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(majority(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(
        majority(&["poly", &data("chain2.rel"), "minority"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(majority(&["--help"]).status.code(), Some(0));
}

#[test]
fn paper_demos_list_and_mutation() {
    let o = majority(&["paper-demos", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 8);

    let dir = tempfile::tempdir().unwrap();
    for (name, text) in majority::demos::DATA_FILES {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let o = majority(&["paper-demos", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let path = dir.path().join("counterexample.rel");
    let edited = std::fs::read_to_string(&path)
        .unwrap()
        .replace("end", "0 1 0\nend");
    std::fs::write(&path, edited).unwrap();
    let o = majority(&[
        "paper-demos",
        "--data-dir",
        dir.path().to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let demos = v["verdict"]["demos"].as_array().unwrap();
    let failed: Vec<&str> = demos
        .iter()
        .filter(|d| d["passed"] == false)
        .map(|d| d["key"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["counterexample"]);
}
