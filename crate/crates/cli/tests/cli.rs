use std::process::{Command, Output};

fn latitude(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latitude")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const G: &str = r#"{"n0":0,"degrees":[1,-1]}"#;
const F: &str = r#"{"n0":0,"degrees":[1,1]}"#;
const H: &str = r#"{"n0":0,"degrees":[1,0,1]}"#;

#[test]
fn degree_command() {
    for (code, want) in [(G, "2"), (F, "0"), (r#"{"n0":1,"degrees":[1]}"#, "-1")] {
        let o = latitude(&["degree", "--code", code]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).lines().next(), Some(want));
    }
}

#[test]
fn count_tables() {
    let o = latitude(&["count", "--code", F, "--max-n", "5", "--format", "csv"]);
    assert_eq!(stdout(&o), "n,count\n1,1\n2,1\n3,1\n4,1\n5,1\n");
    let o = latitude(&["count", "--code", H, "--max-n", "4", "--format", "csv"]);
    assert_eq!(stdout(&o), "n,count\n1,3\n2,7\n3,21\n4,67\n");
    let o = latitude(&["count", "--code", G, "--max-n", "5", "--format", "csv"]);
    assert_eq!(stdout(&o), "n,count\n1,3\n2,inf\n3,9\n4,inf\n5,33\n");
}

#[test]
fn count_json_round_trips() {
    let o = latitude(&["count", "--code", G, "--n", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["total"], 9);
    assert_eq!(v["poles"], 1);
    let entries = v["entries"].as_array().unwrap();
    let sum: u64 = entries.iter().map(|e| e["count"].as_u64().unwrap()).sum();
    assert_eq!(sum + 1, 9);
}

#[test]
fn rational_rotation_hint() {
    let code = r#"{"n0":0,"degrees":[1,1],"rotation_turns":"0"}"#;
    let o = latitude(&["count", "--code", code, "--n", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("inf"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--rotation irr"));
    let o = latitude(&["count", "--code", code, "--n", "1", "--rotation", "irr"]);
    assert_eq!(stdout(&o), "1\t1\n");
}

#[test]
fn census_and_bound() {
    let o = latitude(&["census", "--code", G, "--format", "json"]);
    assert_eq!(
        stdout(&o).trim(),
        r#"{"a":1,"b":0,"c":0,"d":1,"e":0,"N":2,"p":1,"r":0,"slack":1,"degree":2,"bound":3}"#
    );
    let o = latitude(&["bound", "--code", r#"{"n0":0,"degrees":[0]}"#]);
    assert_eq!(stdout(&o).trim(), "2");
    let o = latitude(&["bound", "--code", r#"{"n0":0,"degrees":[3]}"#]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compose_command() {
    let o = latitude(&["compose", "--code", G, "--code", G, "--format", "json"]);
    assert_eq!(stdout(&o).trim(), r#"{"n0":0,"degrees":[1,-1,1,-1]}"#);
    let o = latitude(&["compose", "--code", G]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn entropy_command() {
    let o = latitude(&["entropy", "--code", F]);
    assert!(stdout(&o).starts_with("0.693147180559945"));
    let o = latitude(&["entropy", "--code", H]);
    assert!(stdout(&o).starts_with("1.09861228866810"));
    let o = latitude(&["entropy", "--code", r#"{"breakpoints":[["0","0"],["1","1"]]}"#]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn entropy_from_file() {
    let dir = std::env::temp_dir().join(format!("latitude-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tent.json");
    std::fs::write(&path, r#"{"breakpoints":[["0","0"],["1/2","1"],["1","0"]]}"#).unwrap();
    let out = dir.join("out.txt");
    let o = latitude(&["entropy", "--file", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("0.69314718055994"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_suites() {
    let o = latitude(&["verify", "lemma32", "--max-legs", "6"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS lemma32"));
    let o = latitude(&["verify", "theorem", "--max-legs", "3", "--max-n", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = latitude(&["verify", "oracle", "--samples", "3", "--max-n", "2", "--res", "1024"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = latitude(&["verify", "compose", "--samples", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn verify_json_report() {
    let o = latitude(&["verify", "weakbound", "--max-legs", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn exhausted_budget_is_partial() {
    let o = latitude(&["verify", "theorem", "--time-budget", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("PARTIAL"));
}

#[test]
fn examples_command() {
    let o = latitude(&["examples", "--max-n", "4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("N_n     1, 1, 1, 1"));
    assert!(s.contains("N_n     3, 7, 21, 67"));
    assert!(s.contains("N_n     2, 2, 2, 2"));
    assert!(s.contains("NOT_C1_REALIZABLE"));
}

#[test]
fn oracle_command() {
    let o = latitude(&["oracle", "--code", H, "--n", "2", "--res", "1024"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("oracle=7 exact=7 agree"));
    let o = latitude(&["oracle", "--code", G, "--n", "2", "--res", "1024"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors() {
    assert_eq!(latitude(&["degree", "--code", "not json"]).status.code(), Some(2));
    assert_eq!(latitude(&["degree", "--code", r#"{"n0":0,"degrees":[]}"#]).status.code(), Some(2));
    assert_eq!(latitude(&["degree"]).status.code(), Some(2));
    assert_eq!(latitude(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(latitude(&["count", "--code", G, "--n", "0"]).status.code(), Some(2));
}
