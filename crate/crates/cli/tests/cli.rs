use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn weaver(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weaver"))
        .args(args)
        .env_remove("WEAVER_SMT_CMD")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_safe_program_exits_zero() {
    let o = weaver(&["verify", corpus("peterson.cprog").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("SAFE"));
}

#[test]
fn verify_broken_program_prints_counterexample() {
    let o = weaver(&["verify", corpus("peterson_broken.cprog").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("UNSAFE"));
    assert!(out.contains("counterexample"));
    assert!(out.contains("final valuation:"));
}

#[test]
fn iteration_cap_reports_unknown() {
    let o = weaver(&["verify", "--max-iters", "1", corpus("peterson.cprog").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("UNKNOWN"));
}

#[test]
fn usage_and_input_errors_have_distinct_codes() {
    assert_eq!(weaver(&["verify", "--bogus"]).status.code(), Some(64));
    assert_eq!(weaver(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(weaver(&["verify", "--max-iters", "0", "x"]).status.code(), Some(64));
    assert_eq!(weaver(&["verify", "/nonexistent/p.cprog"]).status.code(), Some(66));
    assert_eq!(weaver(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cprog");
    std::fs::write(&bad, "shared x : {0,1} = 0;\nprocess P { init q; q -> q : a : y := 1; }\n").unwrap();
    let o = weaver(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(65));
    assert!(!o.stderr.is_empty());
}

#[test]
fn stats_json_is_tagged_by_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stats.json");
    let o = weaver(&[
        "verify",
        "--stats-json",
        path.to_str().unwrap(),
        corpus("dekker.cprog").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "safe");
    assert!(v["stats"]["iterations"].as_u64().unwrap() >= 1);
    assert_eq!(v["stats"]["groups"].as_array().unwrap().len(), 2);
}

#[test]
fn dot_dir_receives_one_file_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let o = weaver(&[
        "verify",
        "--dot-dir",
        dir.path().to_str().unwrap(),
        corpus("peterson.cprog").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dots = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "dot"))
        .count();
    assert!(dots >= 1);
}

#[test]
fn inspect_is_deterministic_and_has_four_stages() {
    let file = corpus("peterson.cprog");
    let args = [
        "inspect",
        file.to_str().unwrap(),
        "--trace",
        "a b p q P A r s c",
        "--assert",
        "P1",
        "--format",
        "json",
    ];
    let first = weaver(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&weaver(&args)));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let stages = doc.as_object().unwrap();
    assert_eq!(stages.len(), 4);
    for stage in stages.values() {
        assert_eq!(stage["post"], "l1 != 1");
        assert!(!stage["states"].as_array().unwrap().is_empty());
    }

    let dot = weaver(&args[..6]);
    assert!(stdout(&dot).contains("digraph"));
}

#[test]
fn inspect_rejects_unknown_labels() {
    let o = weaver(&[
        "inspect",
        corpus("peterson.cprog").to_str().unwrap(),
        "--trace",
        "a zz",
        "--assert",
        "P1",
    ]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn bench_agrees_with_explicit_search() {
    let o = weaver(&["bench", "--corpus", corpus("").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("peterson.safe"));
    assert!(out.contains("peterson_broken.unsafe"));
}

#[test]
fn selftest_reports_no_disagreements() {
    let o = weaver(&["selftest", "--count", "20", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 disagreements"));
}
