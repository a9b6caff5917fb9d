use std::process::{Command, Output};

use nilpotwist::verify::{parse_report, render_report, Format, Status};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilpotwist")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn p4_suite_passes_and_is_byte_deterministic() {
    let a = run(&["verify", "--suite", "p4-classification", "--p", "3", "--format", "json"]);
    let b = run(&["verify", "--suite", "p4-classification", "--p", "3", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = parse_report(&stdout(&a)).unwrap();
    assert!(report.passed());
    assert_eq!(render_report(&report, Format::Json), a.stdout);
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn text_report_lines() {
    let o = run(&["verify", "--suite", "theorem", "--group", "heisenberg:p=3:k=2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS center-chain |Z| chain 9<81<729 (heisenberg(p=3,k=2))"), "{}", stdout(&o));
}

#[test]
fn json_file_output() {
    let path = std::env::temp_dir().join(format!("nilpotwist-report-{}.json", std::process::id()));
    let o = run(&["verify", "--suite", "corollary", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = parse_report(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.suite, "corollary");
    assert!(report.checks.iter().all(|c| c.status == Status::Pass));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--group", "burnside:Q:p=3"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "theorem", "--p", "4"]).status.code(), Some(2));
    // Class 3 under strict mode.
    assert_eq!(run(&["build", "--group", "unitriangular:p=3", "--twist", "1"]).status.code(), Some(1));
    let unchecked = run(&["build", "--group", "unitriangular:p=3", "--twist", "1", "--unchecked"]);
    assert_eq!(unchecked.status.code(), Some(0));
    assert!(stdout(&unchecked).contains("not associative"));
    // A search budget of one candidate cannot settle twist(B) against its abelian class member.
    let o = run(&["verify", "--suite", "theorem", "--group", "B", "--group", "abelian:9x3x3", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn iso_and_string_commands() {
    let o = run(&["iso", "--group", "B", "--group", "D", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["isomorphic"], false);
    assert_eq!(v["verdict"]["separating_invariant"], "center_order_structure");

    let o = run(&["string", "--group", "A", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    assert_eq!(v["terms"][1]["abelian"], true);
    assert_eq!(v["sylow"][0], serde_json::json!({"p": 3, "n": 1, "t": 1}));
    assert_eq!(v["pairwise_non_isomorphic"], true);
}

#[test]
fn catalog_command_lists_maximal_members() {
    let o = run(&["catalog", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("maximal {B(p=3), D(p=3), E(p=3)}"), "{text}");
    assert!(text.contains("maximal {A(p=3)}"), "{text}");
}

#[test]
fn build_from_presentation_file() {
    let path = std::env::temp_dir().join(format!("nilpotwist-heis-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"label": "H27", "generators": [{"order": 3}, {"order": 3}, {"order": 3}], "commutators": {"2,1": [0, 0, 1]}}"#,
    )
    .unwrap();
    let o = run(&["build", "--spec", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 27);
    assert_eq!(v["fingerprint"]["center_order"], 3);
    std::fs::remove_file(path).unwrap();
}
