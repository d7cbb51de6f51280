use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const SAT_INSTANCE: &str = "p x3c 3 3\n1 -3 0\n1 -2 3 0\n2 -3 0\n";
const UNSAT_INSTANCE: &str = "p x3c 4 3\n1 -2 3 0\n-3 -4 0\n-3 -2 1 0\n";

fn x3sat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_x3sat"))
        .args(args)
        .env_remove("X3SAT_STORE")
        .stdin(Stdio::null())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_sat_and_unsat_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "sat.x3c", SAT_INSTANCE);
    let o = x3sat(&["solve", &sat]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "s SATISFIABLE\nv -1 -2 -3 0\n");

    let unsat = write(dir.path(), "unsat.x3c", UNSAT_INSTANCE);
    let o = x3sat(&["solve", &unsat, "--json"]);
    assert_eq!(o.status.code(), Some(20));
    assert!(stdout(&o).starts_with(r#"{"status":"unsat","assignment":null,"#));
}

#[test]
fn solve_json_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "sat.x3c", SAT_INSTANCE);
    let o = x3sat(&["solve", &sat, "--json"]);
    assert_eq!(
        stdout(&o),
        "{\"status\":\"sat\",\"assignment\":[-1,-2,-3],\"psi_hat\":[-1,-2,-3],\"residual_clauses\":[],\"steps\":10,\"generations\":2}\n"
    );
}

#[test]
fn solve_writes_trace_and_honours_budget() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "sat.x3c", SAT_INSTANCE);
    let trace = dir.path().join("trace.jsonl");
    let o = x3sat(&["solve", &sat, "--trace", trace.to_str().unwrap(), "--order", "neg-first"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().count() >= 1);
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("event").is_some());
    }

    let o = x3sat(&["solve", &sat, "--step-budget", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("s UNKNOWN"));
}

#[test]
fn parse_errors_are_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.x3c", "p x3c 2 1\n1 2 3 0\n");
    let o = x3sat(&["solve", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(x3sat(&["solve", "/nonexistent/x.x3c"]).status.code(), Some(1));
}

#[test]
fn oracle_counts_models() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "sat.x3c", SAT_INSTANCE);
    let o = x3sat(&["oracle", &sat, "--count"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "c models 1\ns SATISFIABLE\nv -1 -2 -3 0\n");
    let unsat = write(dir.path(), "unsat.x3c", UNSAT_INSTANCE);
    assert_eq!(x3sat(&["oracle", &unsat]).status.code(), Some(20));
    let units = write(dir.path(), "units.x3c", "p x3c 2 0\nu -2 0\n");
    let o = x3sat(&["oracle", &units, "--count"]);
    assert_eq!(stdout(&o), "c models 2\ns SATISFIABLE\nv -1 -2 0\n");
}

#[test]
fn verify_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "sat.x3c", SAT_INSTANCE);
    let good = write(dir.path(), "good", "s SATISFIABLE\nv -1 -2 -3 0\n");
    let o = x3sat(&["verify", &sat, &good]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "OK\n"));
    let wrong = write(dir.path(), "wrong", "v 1 -2 -3 0\n");
    let o = x3sat(&["verify", &sat, &wrong]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("INVALID"));
    let short = write(dir.path(), "short", "v 1 0\n");
    assert_eq!(x3sat(&["verify", &sat, &short]).status.code(), Some(1));
}

#[test]
fn fuzz_store_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("cx.jsonl");
    let store_s = store.to_str().unwrap();
    let args = ["fuzz", "--seed", "7", "--n", "16", "--m", "8", "--count", "300", "--store", store_s];
    let o = x3sat(&args);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["runs"], 300);
    let ids = summary["store_ids"].as_array().unwrap().clone();
    assert!(!ids.is_empty());

    let first_store = fs::read(&store).unwrap();
    let rep = x3sat(&["replay", store_s, ids[0].as_str().unwrap()]);
    assert_eq!(rep.status.code(), Some(3));
    let r: serde_json::Value = serde_json::from_str(&stdout(&rep)).unwrap();
    assert_eq!(r["reproduced"], true);
    assert_eq!(r["digest_matches"], true);
    assert_eq!(x3sat(&["replay", store_s, "cx-999999"]).status.code(), Some(1));

    // Same campaign into a fresh store is byte-identical.
    let again = dir.path().join("again.jsonl");
    let mut args2 = args;
    args2[10] = again.to_str().unwrap();
    let o2 = x3sat(&args2);
    assert_eq!(stdout(&o2), stdout(&o));
    assert_eq!(fs::read(&again).unwrap(), first_store);
}

#[test]
fn fuzz_uses_store_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("env.jsonl");
    let o = Command::new(env!("CARGO_BIN_EXE_x3sat"))
        .args(["fuzz", "--seed", "7", "--n", "16", "--m", "8", "--count", "200"])
        .env("X3SAT_STORE", &store)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(store.exists());
}

#[test]
fn fuzz_clean_campaign_exits_zero() {
    let o = x3sat(&["fuzz", "--seed", "1", "--n", "6", "--m", "12", "--count", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let o = x3sat(&["fuzz", "--seed", "1", "--n", "1", "--m", "2", "--count", "5"]);
    assert_eq!(o.status.code(), Some(1));
}
