use assert_cmd::Command;
use serde_json::Value;

fn nilcox() -> Command {
    Command::cargo_bin("nilcox").unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let out = nilcox().args(args).assert().success().get_output().stdout.clone();
    serde_json::from_slice(&out).unwrap()
}

#[test]
fn verify_all_passes_for_a2() {
    let v = json_of(&["verify", "all", "--group", "A2"]);
    let reports = v.as_array().unwrap();
    assert!(reports.len() >= 8);
    assert!(reports.iter().all(|r| r["passed"] == true), "{v:#}");
}

#[test]
fn graph_of_longest_element_is_connected() {
    let v = json_of(&["rex", "graph", "--group", "A2", "--coset", r#"{"I":[],"J":[],"pmin":[0,1,0]}"#]);
    assert_eq!(v["connected"], true);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    let dot = nilcox().args(["rex", "graph", "--group", "A2", "--format", "dot", "--coset", r#"{"I":[],"J":[],"pmin":[0,1,0]}"#]).assert().success();
    assert!(String::from_utf8_lossy(&dot.get_output().stdout).starts_with("graph matsumoto {"));
}

#[test]
fn coset_enumeration() {
    let v = json_of(&["cosets", "enumerate", "--group", "A2", "--I", "0", "--J", "1"]);
    let ps = v.as_array().unwrap();
    assert_eq!(ps.len(), 2);
    assert_eq!(ps[1]["pmin"], serde_json::json!([1, 0]));
    assert_eq!(ps[1]["pmax"], serde_json::json!([0, 1, 0]));
}

#[test]
fn reduce_reports_trace() {
    let v = json_of(&["rex", "reduce", "--group", "A2", "--expr", "[∅ + 0 - 0 + 0 - 0]"]);
    assert_eq!(v["reduced"], serde_json::json!([[], [0], []]));
    assert_eq!(v["trace"][0]["kind"], "star-quadratic-contract");
}

#[test]
fn demazure_apply_and_domain_check() {
    let x1 = r#"[{"exp":[1,0,0],"num":"1","den":"1"}]"#;
    let v = json_of(&["demazure", "apply", "--group", "A2", "--op", r#"{"kind":"simple","s":0}"#, "--poly", x1]);
    assert_eq!(v, serde_json::json!([{"exp":[0,0,0],"num":"1","den":"1"}]));
    nilcox()
        .args(["demazure", "apply", "--group", "A2", "--op", r#"{"kind":"coset","I":[0],"J":[1],"pmin":[]}"#, "--poly", r#"[{"exp":[0,1,0],"num":"1","den":"1"}]"#])
        .assert()
        .code(2);
}

#[test]
fn dual_bases_json() {
    let v = json_of(&["frobenius", "dual-bases", "--group", "A2", "--J", "0"]);
    assert_eq!(v["status"], "dual");
    assert_eq!(v["c"].as_array().unwrap().len(), 2);
    let v = json_of(&["frobenius", "dual-bases", "--coset", r#"{"I":[0,2],"J":[0,2],"pmin":[1]}"#]);
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 4);
}

#[test]
fn input_errors_exit_two() {
    let dir = std::env::temp_dir().join("nilcox-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"labels":["a","b"],"m":[[1,3],[3 "#).unwrap();
    let out = nilcox().args(["cosets", "enumerate", "--matrix", path.to_str().unwrap()]).assert().code(2);
    assert!(String::from_utf8_lossy(&out.get_output().stderr).contains("column"));
    nilcox().args(["cosets", "enumerate", "--I", "q"]).assert().code(2);
    nilcox().args(["rex", "reduce", "--expr", "[{0} + 0]"]).assert().code(2);
    nilcox().args(["bogus"]).assert().code(2);
}

#[test]
fn output_is_deterministic() {
    let args = ["rex", "list", "--group", "B2", "--coset", r#"{"I":[],"J":[],"pmin":[0,1,0,1]}"#];
    let a = nilcox().args(args).assert().success().get_output().stdout.clone();
    let b = nilcox().args(args).assert().success().get_output().stdout.clone();
    assert_eq!(a, b);
}
