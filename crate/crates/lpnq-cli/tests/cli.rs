//! Golden tests over the command-line surface: report shapes, the text/json
//! agreement, and the stable exit codes.

use std::fs;
use std::process::Command;

use serde_json::Value;

fn lpnq(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lpnq")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn reports_the_maximal_class_of_a_terminating_group() {
    let (code, out, _) = lpnq(&["compute", "catalog:fg:6", "--max-class", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("class:   3"), "out: {}", out);
    assert!(out.contains("maximal: yes"));
    assert!(out.contains("gens:    4"));
}

#[test]
fn prints_layers_in_collected_form() {
    let (code, out, _) = lpnq(&["compute", "catalog:grigorchuk", "--max-class", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("layers:  2^[3], 2^[2], 2^[2]"), "out: {}", out);
}

#[test]
fn text_and_json_reports_carry_the_same_data() {
    let (code, text, _) = lpnq(&["compute", "catalog:fg:5", "--max-class", "6"]);
    assert_eq!(code, 0);
    let (code, raw, _) =
        lpnq(&["compute", "catalog:fg:5", "--max-class", "6", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&raw).expect("json parses");

    assert_eq!(v["class"], 6);
    assert_eq!(v["maximal"], false);
    assert_eq!(v["total_gens"], 8);
    assert_eq!(v["gens_invariant_cover"], Value::Null);
    assert_eq!(v["seconds_per_class"].as_array().map(|a| a.len()), Some(6));
    let layers: Vec<Vec<i64>> = v["layers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l.as_array().unwrap().iter().map(|d| d.as_i64().unwrap()).collect())
        .collect();
    assert_eq!(layers, vec![vec![5, 5], vec![5], vec![5], vec![5], vec![5, 5], vec![5]]);

    // the same facts, rendered
    assert!(text.contains("class:   6"), "text: {}", text);
    assert!(text.contains("maximal: no"));
    assert!(text.contains("layers:  5^[2], 5, 5, 5, 5^[2], 5"));
    assert!(text.contains("gens:    8"));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = lpnq(&[
        "compute",
        "catalog:fg:6",
        "--max-class",
        "4",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty(), "report goes to the file, not stdout");
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["class"], 3);
    assert_eq!(v["maximal"], true);
}

#[test]
fn unreadable_or_unknown_input_exits_1() {
    let (code, _, err) = lpnq(&["compute", "/nonexistent/group.lp"]);
    assert_eq!(code, 1);
    assert!(err.contains("lpnq:"));
    let (code, _, _) = lpnq(&["compute", "catalog:wat"]);
    assert_eq!(code, 1);
    let (code, _, _) = lpnq(&["compute", "catalog:fg:6", "--format", "yaml"]);
    assert_eq!(code, 1);
    let (code, _, _) = lpnq(&["compute", "catalog:fg:6", "--strategy", "sideways"]);
    assert_eq!(code, 1);
}

#[test]
fn hitting_the_time_limit_exits_2_with_a_partial_report() {
    let (code, out, _) =
        lpnq(&["compute", "catalog:free:3", "--max-class", "8", "--time-limit", "1"]);
    assert_eq!(code, 2);
    assert!(out.contains("maximal: no"));
    let class: usize = out
        .lines()
        .find_map(|l| l.strip_prefix("class:"))
        .and_then(|s| s.trim().parse().ok())
        .expect("class line");
    assert!(class < 8, "stopped early, got class {}", class);
}

#[test]
fn an_undeclared_fixed_relator_set_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.lpres");
    fs::write(
        &path,
        "lpres {\n  gens: a, b;\n  fixed: b;\n  endo phi { a -> a; b -> a^2; }\n  iter: ;\n  flags: ;\n}\n",
    )
    .unwrap();
    let (code, _, err) =
        lpnq(&["compute", path.to_str().unwrap(), "--qbar", "all", "--max-class", "3"]);
    assert_eq!(code, 3, "stderr: {}", err);
}

#[test]
fn consistency_violations_exit_4_and_are_printed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.pcp");
    fs::write(&path, "g1 order 2 weight 1\ng2 order 3 weight 2\ng2^g1 = g2^2\ng1^2 = g2\n")
        .unwrap();
    let (code, out, _) = lpnq(&["check-consistency", path.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(out.contains("1 violation(s)"), "out: {}", out);

    let good = dir.path().join("good.pcp");
    fs::write(&good, "g1 order 2 weight 1\ng2 order 2 weight 2\ng1^2 = g2\n").unwrap();
    let (code, out, _) = lpnq(&["check-consistency", good.to_str().unwrap()]);
    assert_eq!(code, 0, "out: {}", out);
    assert!(out.contains("consistent"));
}

#[test]
fn verify_tree_confirms_a_catalog_pairing() {
    let (code, out, _) =
        lpnq(&["verify-tree", "catalog:fg:4", "--iter", "3", "--depth", "6"]);
    assert_eq!(code, 0);
    assert!(out.contains("all act trivially"), "out: {}", out);
}

#[test]
fn abelian_prints_the_elementary_divisors() {
    let (code, out, _) = lpnq(&["abelian", "catalog:grigorchuk"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "(2,2,2)");
}
