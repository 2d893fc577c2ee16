use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qog::report::RunReport;

fn qog(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qog")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "v.json", r#"{"builtin":"p-adic:2"}"#);
    write(p, "vtable.json", r#"{"values":["0","1"],"table":{"(1)":"0","(2)":"1","(3)":"0"}}"#);
    write(p, "qo.json", r#"{"kind":"valuational","valuation":{"builtin":"p-adic:2"}}"#);
    write(p, "chain.json", r#"{"kind":"matrix","rows":[[1,1,1,1],[0,1,1,1],[0,0,1,1],[0,0,0,1]]}"#);
    dir
}

#[test]
fn check_reports_each_axiom() {
    let dir = setup();
    let o = qog(dir.path(), &["check", "--group", "Z/4", "--qo", "qo.json", "--axioms", "Q1,Q2,C"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in ["PASS axiom Q1", "PASS axiom Q2", "PASS axiom C_AXIOMS", "overall: PASS"] {
        assert!(out.contains(line), "{out}");
    }
}

#[test]
fn failing_check_exits_one() {
    let dir = setup();
    let o = qog(dir.path(), &["check", "--group", "Z/4", "--qo", "chain.json", "--axioms", "C", "--valuation", "v.json"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL axiom C_AXIOMS"), "{out}");
    assert!(out.contains("FAIL valuation compatible"), "{out}");
}

#[test]
fn input_errors_exit_two() {
    let dir = setup();
    let p = dir.path();
    assert_eq!(qog(p, &["check", "--group", "Z/4", "--qo", "missing.json"]).status.code(), Some(2));
    assert_eq!(qog(p, &["check", "--group", "Z/q", "--qo", "qo.json"]).status.code(), Some(2));
    write(p, "bad.json", "{not json");
    assert_eq!(qog(p, &["check", "--group", "Z/4", "--qo", "bad.json"]).status.code(), Some(2));
    assert_eq!(qog(p, &["check", "--group", "Z/4"]).status.code(), Some(2));
    assert_eq!(qog(p, &["no-such-command"]).status.code(), Some(2));
}

#[test]
fn bk_verify_all_families() {
    let dir = setup();
    let o = qog(dir.path(), &["bk-verify", "--group", "Z/4", "--valuation", "vtable.json", "--all-families", "--json", "r.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: RunReport = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report.details["family count"], 1);
    assert!(report.overall_pass);
    assert_eq!(report.inputs.len(), 1);
    assert_eq!(report.inputs[0].sha256.len(), 64);
}

#[test]
fn field_demo_counts_two_orders() {
    let dir = setup();
    let o = qog(dir.path(), &["field-demo", "--seed", "7", "--json", "f.json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: RunReport = serde_json::from_str(&fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(report.details["count"], 2);
    assert_eq!(report.seed, Some(7));
}

#[test]
fn reports_reproduce_from_echoed_command() {
    let dir = setup();
    let p = dir.path();
    let first = qog(p, &["induce", "--group", "Z/4", "--qo", "qo.json", "--subgroup", "(2)", "--json", "a.json"]);
    assert_eq!(first.status.code(), Some(0));
    let a: RunReport = serde_json::from_str(&fs::read_to_string(p.join("a.json")).unwrap()).unwrap();
    let mut args = a.command.clone();
    let k = args.iter().position(|s| s == "--json").unwrap();
    args[k + 1] = "b.json".into();
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    qog(p, &args);
    let b: RunReport = serde_json::from_str(&fs::read_to_string(p.join("b.json")).unwrap()).unwrap();
    assert_eq!(a.inputs, b.inputs);
    assert_eq!(a.checks, b.checks);
    assert_eq!(a.details, b.details);
    assert_eq!(a.details["induced"], "{(0)} < {(1)}");
}

#[test]
fn enumerate_and_omega() {
    let dir = setup();
    let p = dir.path();
    let o = qog(p, &["enumerate", "--group", "Z/3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"candidates\":13"), "{}", stdout(&o));
    write(p, "o.json", r#"{"kind":"lex","signs":[-1]}"#);
    let o = qog(p, &["omega", "--group", "Z^1[B=10]", "--order", "o.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS Ω of the preimage is the order"));
    let o = qog(p, &["omega", "--group", "Z/4", "--qo", "qo.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lift_and_coarsen() {
    let dir = setup();
    let p = dir.path();
    write(
        p,
        "fam.json",
        r#"{"valuation":{"builtin":"p-adic:2"},
            "members":{"0":{"kind":"matrix","rows":[[1,1],[0,1]]},"1":{"kind":"matrix","rows":[[1,1],[0,1]]}}}"#,
    );
    let o = qog(p, &["lift", "--group", "Z/4", "--family", "fam.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("lifted: {(0)} < {(2)} < {(1) (3)}"));
    write(p, "triv.json", r#"{"builtin":"trivial"}"#);
    let o = qog(p, &["coarsen", "--group", "Z/4", "--v", "triv.json", "--w", "v.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
