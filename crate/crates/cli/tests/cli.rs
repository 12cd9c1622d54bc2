use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lfree"))
        .args(args)
        .output()
        .expect("binary runs");
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().expect("exit code"), v, out.stdout)
}

#[test]
fn eq_info_reports_translation_invariance() {
    let (code, v, _) = run(&["eq", "info", "1,1,-1=0"]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"]["profile"]["translation_invariant"], false);
    let (_, v, _) = run(&["eq", "info", "-e", "1,1,-2=0"]);
    assert_eq!(v["answer"]["profile"]["translation_invariant"], true);
}

#[test]
fn bad_equations_exit_2() {
    assert_eq!(run(&["eq", "info", "1,0,1=0"]).0, 2);
    assert_eq!(run(&["eq", "info", "1,1"]).0, 2);
    let (code, v, _) = run(&["gadget", "inhom", "-e", "2,2,-2=1", "-g", "edge"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("does not divide"));
}

#[test]
fn gadgets_verify() {
    let (code, v, _) = run(&["gadget", "hom", "-e", "1,1,-1=0", "-g", "edge"]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"]["size"], 3);
    let conds = v["verification"]["conditions"].as_array().unwrap();
    assert_eq!(conds.len(), 7);
    assert!(conds.iter().all(|c| c["passed"] == true));

    let (code, v, _) = run(&["gadget", "count3", "-e", "1,1,-1=0", "-g", "edge", "-r", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"]["size"], 5);

    let (code, v, _) = run(&["gadget", "hom-sef", "-e", "1,1,-2=0", "-g", "p3", "--no-verify"]);
    assert_eq!(code, 0);
    assert!(v.get("verification").is_none());
}

#[test]
fn counting_gadget_needs_r() {
    assert_eq!(run(&["gadget", "count4", "-e", "1,1,1,-1=0", "-g", "edge"]).0, 2);
}

#[test]
fn solve_modes() {
    let (_, v, _) = run(&["solve", "max", "-e", "1,1,-1=0", "-A", "[1,2,3]"]);
    assert_eq!(v["answer"]["size"], 2);
    let (_, v, _) = run(&["solve", "count", "-e", "1,1,-1=0", "[1,2,3]"]);
    assert_eq!(v["answer"]["count"], 6);
    let (code, v, _) = run(&["solve", "free", "-e", "1,1,-1=0", "-A", "[2,3]"]);
    assert_eq!((code, &v["answer"]["free"]), (0, &Value::Bool(true)));
}

#[test]
fn verify_free_fails_with_witness() {
    let (code, v, _) = run(&["verify", "free", "-e", "1,1,-1=0", "-A", "1,2"]);
    assert_eq!(code, 1);
    assert_eq!(v["witness"], serde_json::json!([1, 1, 2]));
    assert_eq!(run(&["verify", "free", "-e", "1,1,-1=0", "-A", "1,3"]).0, 0);
}

#[test]
fn reduce_decision_on_path() {
    let (code, v, _) = run(&["reduce", "decision", "-e", "1,1,-1=0", "-g", "p3", "-k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"]["threshold"], 4);
    assert_eq!(v["answer"]["equiv_verified"], true);
}

#[test]
fn reduce_count_paths() {
    let (code, v, _) = run(&["reduce", "count", "-e", "1,1,-1=0", "-g", "edge"]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"]["independent_sets"], 3);
    let (code, v, _) = run(&["reduce", "count", "-e", "1,-1,1,-1=0", "-g", "p3"]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"]["independent_sets"], 5);
    assert_eq!(v["answer"]["path"], "vandermonde");
}

#[test]
fn reduce_epsilon_from_graph() {
    let (code, v, _) = run(&[
        "reduce", "epsilon", "-e", "1,1,-1=0", "-g", "edge", "-k", "1", "--S", "1,2,3", "--Sprime", "1,3",
        "--epsilon", "3/4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"]["equiv_verified"], true);
    let l = &v["ledger"];
    let t = l["t"].as_u64().unwrap();
    assert_eq!(v["answer"]["threshold"].as_u64().unwrap(), l["k_star"].as_u64().unwrap() + t);
}

#[test]
fn graph_files_are_read() {
    let dir = std::env::temp_dir().join(format!("lfree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("p3.json");
    std::fs::write(&json, r#"{"n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
    let dimacs = dir.join("p3.col");
    std::fs::write(&dimacs, "c path\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
    for f in [&json, &dimacs] {
        let (code, v, _) = run(&["reduce", "count", "-e", "1,1,-1=0", "-g", f.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(v["answer"]["independent_sets"], 5);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn output_is_deterministic() {
    let args = ["gadget", "inhom", "-e", "1,1,1=6", "-g", "c4"];
    let (_, _, a) = run(&args);
    let (_, _, b) = run(&args);
    assert_eq!(a, b);
    let (_, _, c) = run(&["graph", "gen", "random:6:0.5", "--seed", "9"]);
    let (_, _, d) = run(&["graph", "gen", "random:6:0.5", "--seed", "9"]);
    assert_eq!(c, d);
}

#[test]
fn sequential_matches_parallel() {
    let args = ["gadget", "hom", "-e", "2,3,-5=0", "-g", "k3"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a["gadget"], b["gadget"]);
}
