use std::process::{Command, Output};

fn positroid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_positroid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn poincare_prints_both_polynomials() {
    let o = positroid(&["poincare", "-k", "1", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 + 3q + 3q^2 | tnn dual: 3 + 3q + q^2\n");
}

#[test]
fn verify_small_case_succeeds() {
    let o = positroid(&["verify", "-k", "1", "-n", "3", "-p", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    let o = positroid(&["necklaces", "-k", "9", "-n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k < n"));
    assert_eq!(
        positroid(&["count-points", "-k", "1", "-n", "3", "-p", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(positroid(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(positroid(&["perm"]).status.code(), Some(2));
}

#[test]
fn printed_kt_tuples_fail_and_corrected_pass() {
    let o = positroid(&["gkm-verify"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("tuple 7: degree 4, gkm FAIL"));
    assert!(stdout(&o).contains("333 -> 133 (e3-e1-2d)"));
    assert_eq!(
        positroid(&["gkm-verify", "--corrected"]).status.code(),
        Some(0)
    );
}

#[test]
fn moment_graph_outputs_are_deterministic() {
    let a = positroid(&["moment-graph", "-k", "2", "-n", "4", "--format", "dot"]);
    let b = positroid(&["moment-graph", "-k", "2", "-n", "4", "--format", "dot"]);
    assert_eq!(a.stdout, b.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_positroid"))
        .args(["moment-graph", "-k", "2", "-n", "4", "--format", "dot"])
        .env("POSITROID_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
    let o = positroid(&["moment-graph", "-k", "1", "-n", "2", "--format", "dot"]);
    assert_eq!(
        stdout(&o),
        "digraph \"X(1,2)\" {\n  v0 [label=\"11\"];\n  v1 [label=\"12\"];\n  v2 [label=\"22\"];\n  v0 -> v1 [label=\"e1-e2-1d\"];\n  v2 -> v1 [label=\"e2-e1-1d\"];\n}\n"
    );
}

#[test]
fn moment_graph_json_parses_back() {
    let o = positroid(&["moment-graph", "-k", "1", "-n", "3", "--format", "json"]);
    let g = positroid_core::momentgraph::from_json(stdout(&o).trim()).unwrap();
    assert_eq!(g, positroid_core::momentgraph::build(1, 3).unwrap());
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("positroid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("necklaces.txt");
    let o = positroid(&[
        "necklaces",
        "-k",
        "1",
        "-n",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "111\n121\n123\n133\n222\n223\n333\n");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn numeric_subcommands() {
    let o = positroid(&[
        "hom-dim",
        "-n",
        "5",
        "--source",
        "1:3,2:3,3:3,4:3,5:3",
        "--target",
        "1:2,2:2,3:1,4:2,5:1",
    ]);
    assert_eq!(stdout(&o), "8\n");
    assert_eq!(
        stdout(&positroid(&[
            "hom-dim", "-n", "4", "--source", "full", "--target", "full"
        ])),
        "16\n"
    );
    assert_eq!(
        stdout(&positroid(&[
            "degeneration-dim",
            "-k",
            "2",
            "-n",
            "4",
            "-r",
            "4"
        ])),
        "4\n"
    );
    assert_eq!(
        stdout(&positroid(&[
            "count-points",
            "-k",
            "1",
            "-n",
            "3",
            "-p",
            "2"
        ])),
        "19\n"
    );
    let d = stdout(&positroid(&["desing", "-n", "4", "-J", "1,2"]));
    assert!(d.contains("total dimension 4"));
    let p = stdout(&positroid(&["perm", "--necklace", "13|34|34|14"]));
    assert!(p.contains("[4,2,5,7]") && p.contains("length 2"));
}

#[test]
fn cellularity_report_json() {
    let o = positroid(&[
        "count-points",
        "-k",
        "1",
        "-n",
        "2",
        "-p",
        "2",
        "--classes",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["points"], 5);
    assert_eq!(v["classes"].as_array().unwrap().len(), 3);
}
