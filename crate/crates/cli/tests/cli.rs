use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branchwork"))
        .args(args)
        .env_remove("BRANCHWORK_SPEC")
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn order_of_b_times_e0() {
    let out = run(&["--spec", "K5", "order", "--word", "D s[0]"]);
    assert!(out.status.success());
    let v = &json_lines(&out)[0];
    assert_eq!(v["format"], 1);
    assert_eq!(v["order"], 4);
    assert_eq!(v["exponent"], 2);
}

#[test]
fn json_and_text_words_agree() {
    let json = r#"{"level":0,"letters":[{"directed":true},{"rooted":{"polarity":"sparse","support":["0"]}}]}"#;
    let a = json_lines(&run(&["--spec", r#"{"family":"Kr","r":5}"#, "order", "--word", json]));
    let b = json_lines(&run(&["--spec", "K5", "order", "--word", "D s[0]"]));
    assert_eq!(a, b);

    let dir = std::env::temp_dir().join(format!("branchwork-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.json");
    std::fs::write(&path, json).unwrap();
    let c = json_lines(&run(&["--spec", "K5", "order", "--word", &format!("@{}", path.display())]));
    assert_eq!(a, c);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn infinite_order_exits_with_budget_code() {
    let out = run(&["--spec", "K1", "order", "--word", "D s[0]"]);
    assert_eq!(out.status.code(), Some(3));
    let v = &json_lines(&out)[0];
    assert_eq!(v["order"], Value::Null);
    assert_eq!(v["exceeded_budget"]["infinite"], true);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "budget");
}

#[test]
fn small_budget_is_reported() {
    let out = run(&["--spec", "K5", "--budget-ball", "10", "ball", "--radius", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["--spec", "Q7", "order", "--word", "D"]).status.code(), Some(2));
    assert_eq!(run(&["--spec", "K3", "order", "--word", "s[9]"]).status.code(), Some(2));
    assert_eq!(run(&["--spec", "K3", "verify", "no_such_check"]).status.code(), Some(2));
    assert_eq!(run(&["--spec", "K3", "--budget-support", "0", "order", "--word", "D"]).status.code(), Some(2));
    assert_eq!(run(&["order"]).status.code(), Some(2));
}

#[test]
fn section_and_action() {
    // b at the vertex e_0-bar sections to e_0
    let out = run(&["--spec", "K3", "section", "--word", "D", "--vertex", "[c[0]]"]);
    assert_eq!(json_lines(&out)[0]["text"], "s[0]");
    let out = run(&["--spec", "K3", "section", "--word", "D", "--vertex", "[s[]]"]);
    assert_eq!(json_lines(&out)[0]["text"], "D");
    let out = run(&["--spec", "K3", "act", "--word", "s[0]", "--vertex", "[s[1], s[2]]"]);
    assert_eq!(json_lines(&out)[0]["text"], "[c[2], s[2]]");
}

#[test]
fn ball_csv_and_json() {
    let out = run(&["--spec", "K3", "--gens", "E", "--format", "csv", "ball", "--radius", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "length,word_json");
    assert_eq!(lines.len(), 6);
    let out = run(&["--spec", "K5", "ball", "--radius", "2"]);
    let v = &json_lines(&out)[0];
    assert_eq!(v["size"], 1632);
    assert_eq!(v["sphere_sizes"], serde_json::json!([1, 63, 1568]));
}

#[test]
fn period_growth_csv() {
    let out = run(&["--spec", "K5", "--format", "csv", "period-growth", "--n", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let pis: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(pis, ["1", "2", "8", "8"]);
}

#[test]
fn min_length_and_chi() {
    let out = run(&["--spec", "K3", "min-length", "--word", "D s[0] D"]);
    assert_eq!(json_lines(&out)[0]["length"], 3);
    let out = run(&["--spec", "K5", "chi", "--law", "xyXY"]);
    let v = &json_lines(&out)[0];
    assert_eq!(v["chi"]["result"], "found");
    assert_eq!(v["chi"]["total"], 2);
}

#[test]
fn verify_is_reproducible_across_threads() {
    let a = run(&["--threads", "1", "verify", "check_commutator_sections", "--r", "6"]);
    let b = run(&["--threads", "2", "verify", "check_commutator_sections", "--r", "6"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = &json_lines(&a)[0];
    assert_eq!(v["passed"], true);
    assert_eq!(v["elapsed_ms"], 0);
}

#[test]
fn spec_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_branchwork"))
        .args(["order", "--word", "D s[0]"])
        .env("BRANCHWORK_SPEC", "K5")
        .output()
        .unwrap();
    assert_eq!(json_lines(&out)[0]["order"], 4);
}
