use std::path::Path;
use std::process::{Command, Output};

use hctab::programs;

fn hctab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hctab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn program(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_prints_yes_and_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let file = program(dir.path(), "islist.pl", programs::IS_LIST);
    let out = hctab(&["run", &file, "-q", "is_list([1,2,3])", "--mode", "enhanced", "--stats"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("yes"));
    assert!(text.contains("% subgoals = 4\n"), "{text}");
}

#[test]
fn run_prints_bindings_and_no() {
    let dir = tempfile::tempdir().unwrap();
    let file = program(dir.path(), "edit.pl", programs::EDIT);
    let out = hctab(&["run", &file, "-q", "edit([a,b],[b],D)"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "D = 1\n");
    let out = hctab(&["run", &file, "-q", "edit([a],[b],0)"]);
    assert_eq!(stdout(&out), "no\n");
}

#[test]
fn answers_agree_across_flags() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in programs::ALL {
        let file = program(dir.path(), &format!("{name}.pl"), text);
        let query = match name {
            "is_list" => "is_list([1,1,2,1])",
            "edit" => "edit([1,2,3,1],[2,1,1],D)",
            "create_list" => "create_list(6,L)",
            _ => "path(X,Y)",
        };
        let mut outputs = Vec::new();
        for mode in ["none", "hashcons", "enhanced"] {
            for hash in ["full", "prefix3"] {
                let out = hctab(&["run", &file, "-q", query, "--mode", mode, "--hash", hash]);
                assert!(out.status.success(), "{name} {mode} {hash}");
                outputs.push(stdout(&out));
            }
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{name}: {outputs:?}");
    }
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = hctab(&[
        "bench",
        "is_list_repeat",
        "--sizes",
        "500,1000",
        "--mode",
        "enhanced",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("benchmark,n,mode,hash,seconds,cells,subgoals,answers,"));
    let out = hctab(&["bench", "path_cyclic", "--sizes", "8,16,32,64"]);
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn usage_errors_exit_nonzero() {
    assert!(!hctab(&["bench", "nope"]).status.success());
    assert!(!hctab(&["run", "x.pl", "-q", "true", "--mode", "fast"]).status.success());
    assert!(!hctab(&["frobnicate"]).status.success());
    let out = hctab(&["run", "/nonexistent.pl", "-q", "true"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: reading"));
}

#[test]
fn runtime_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let file = program(dir.path(), "p.pl", "p(X) :- Y is X + 1.\n");
    let out = hctab(&["run", &file, "-q", "p(Z)"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("instantiation error"));
    let file = program(dir.path(), "bad.pl", "p(X :- q.\n");
    assert!(!hctab(&["run", &file, "-q", "p(1)"]).status.success());
}
