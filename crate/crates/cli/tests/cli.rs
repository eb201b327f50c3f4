use std::process::{Command, Output};

use serde_json::Value;
use wittforms_core::ffield::make_field;
use wittforms_core::group::AbGroup;
use wittforms_core::literal::parse_form;
use wittforms_core::powerclass::PowerClassGroup;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittforms")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    serde_json::from_str(&stdout(&all)).expect("one JSON document")
}

#[test]
fn classes_of_f7() {
    let text = stdout(&["--q", "7", "--d", "3", "classes"]);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("class")).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].contains("{1,6}"));
    assert!(lines[1].contains("{3,4}"));
    assert!(lines[2].contains("{2,5}"));
    let doc = json(&["--q", "7", "classes"]);
    assert_eq!(doc["classes"][1]["members"], serde_json::json!([3, 4]));
    assert_eq!(doc["field"]["gen"], 3);
}

#[test]
fn reduce_and_equiv_examples() {
    assert_eq!(stdout(&["--q", "7", "--d", "3", "--H", "max", "reduce", "3,3,3"]).trim(), "3,3,3");
    let eq = stdout(&["--q", "7", "--d", "3", "--H", "max", "equiv", "3,3,3", "1,3,3,1,3,3,3,2,2"]);
    assert_eq!(eq.trim(), "true");
    assert_eq!(stdout(&["--q", "7", "equiv", "1", "3"]).trim(), "false");
}

#[test]
fn text_and_json_verdicts_agree() {
    let pairs = [("1", "3"), ("1,3,2", "<>"), ("3,3,3", "1,3,3,1,3,3,3,2,2"), ("1,1", "6,6,3,2")];
    for kind in ["H", "I"] {
        for (a, b) in pairs {
            let text = stdout(&["--q", "7", "--kind", kind, "equiv", a, b]);
            let doc = json(&["--q", "7", "--kind", kind, "equiv", a, b]);
            assert_eq!(text.trim() == "true", doc["equivalent"].as_bool().unwrap(), "{kind} {a} {b}");
        }
    }
}

#[test]
fn json_round_trips_through_the_parser() {
    let f7 = PowerClassGroup::of_field(make_field(7, 1, 3).unwrap());
    for lit in ["1,1,3,2", "3,3,3", "1,6,3,4,2,5", "<>", "2,2,5"] {
        let doc = json(&["--q", "7", "reduce", lit]);
        let back = parse_form(&f7, doc["reduced"].as_str().unwrap()).unwrap();
        assert_eq!(serde_json::to_value(back.mult()).unwrap(), doc["reduced_mult"], "{lit}");
        let neg = json(&["--q", "7", "neg", lit]);
        let back = parse_form(&f7, neg["neg"].as_str().unwrap()).unwrap();
        assert_eq!(serde_json::to_value(back.mult()).unwrap(), neg["neg_mult"]);
    }
    let v4 = PowerClassGroup::abstract_group(AbGroup::parse("2x2").unwrap(), 4);
    let doc = json(&["--group", "2x2", "--d", "4", "--H", "gens:1", "reduce", "@{(1,0):2,(0,1):3,(1,1):1}"]);
    let back = parse_form(&v4, doc["reduced"].as_str().unwrap()).unwrap();
    assert_eq!(serde_json::to_value(back.mult()).unwrap(), doc["reduced_mult"]);
}

#[test]
fn isotropy_and_classify() {
    let doc = json(&["--q", "7", "isotropy", "1,1"]);
    assert_eq!(doc["isotropic"], true);
    assert_eq!(doc["witness"], serde_json::json!([1, 3]));
    assert_eq!(doc["witness_digits"], serde_json::json!([[1], [3]]));
    let doc = json(&["--q", "7", "isotropy", "1"]);
    assert_eq!(doc["isotropic"], false);
    let doc = json(&["--q", "7", "classify", "1,1"]);
    assert_eq!(doc["flags"]["round"], false);
    let doc = json(&["--q", "7", "classify", "1,3,2"]);
    assert_eq!(doc["flags"]["i_form"], true);
    let out = run(&["--q", "7", "--budget", "100", "isotropy", "1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariants_and_table() {
    let doc = json(&["--q", "7", "invariants", "3,3,3"]);
    assert_eq!(doc["invariants"]["permanent"], 0);
    assert_eq!(doc["invariants"]["dim_index"], 0);
    let doc = json(&["--group", "2", "--d", "4", "invariants", "@0"]);
    assert_eq!(doc["invariants"]["permanent_is_witt_invariant"], false);
    let doc = json(&["--group", "2", "--d", "4", "table", "--op", "mul", "--max-dim", "1"]);
    assert_eq!(doc["classes"], serde_json::json!(["<>", "@{0:1}", "@{1:1}"]));
    assert_eq!(doc["table"][2][2], "@{0:1}");
    let doc = json(&["--q", "7", "invariants", "tr[2]{10},3"]);
    assert_eq!(doc["dim"], 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["--bogus"]).status.code(), Some(64));
    assert_eq!(run(&["classes"]).status.code(), Some(64));
    assert_eq!(run(&["--q", "7", "--group", "3", "classes"]).status.code(), Some(64));
    assert_eq!(run(&["--group", "3", "--kind", "I", "reduce", "@0"]).status.code(), Some(64));
    assert_eq!(run(&["--q", "7", "--kind", "J", "reduce", "1"]).status.code(), Some(64));
    assert_eq!(run(&["--q", "12", "classes"]).status.code(), Some(64));
    let out = run(&["--q", "7", "--d", "7", "classes"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("characteristic"));
    assert_eq!(run(&["--group", "3", "isotropy", "@0"]).status.code(), Some(2));
    assert_eq!(run(&["--q", "7", "reduce", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["--group", "3", "--d", "2", "reduce", "@0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "no-such-check"]).status.code(), Some(2));
}

#[test]
fn verify_reports_and_replays() {
    let doc = json(&["verify", "thm3"]);
    assert_eq!(doc["check_id"], "thm3");
    assert_eq!(doc["verdict"], "pass");
    let list = stdout(&["verify", "--list"]);
    assert_eq!(list.lines().count(), 12);
    let dir = std::env::temp_dir().join(format!("wittforms-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let fields = r#"fields=[{"p":5,"t":1,"d":3,"max_dim":3}]"#;
    let out = run(&["verify", "i-decomp-unique", "--param", fields, "--replay-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let file = std::fs::read_dir(&dir).unwrap().next().unwrap().unwrap().path();
    let out = run(&["--json", "verify", "--replay", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let again: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(again["verdict"], "fail");
    std::fs::remove_dir_all(dir).unwrap();
}
