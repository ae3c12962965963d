use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn polydisc(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_polydisc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    child.wait_with_output().unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn hull_from_stdin() {
    let o = polydisc(&["hull", "--in", "-"], Some(r#"{"points":[[0,0],[2,0],[0,2],[1,1],[2,2]]}"#));
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["vertices"], json!([["0", "0"], ["0", "2"], ["2", "0"], ["2", "2"]]));
}

#[test]
fn hull_from_file() {
    let path = std::env::temp_dir().join(format!("polydisc-cli-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"points":[[0],[3],[1]]}"#).unwrap();
    let o = polydisc(&["hull", "--in", path.to_str().unwrap(), "--json-indent", "0"], None);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), r#"{"ambient_dim":1,"dim":1,"vertices":[["0"],["3"]]}"#);
}

#[test]
fn universal_quadratic_discriminant() {
    let o = polydisc(&["discriminant-newton", "--universal", "--config", r#"{"dim":1,"points":[[0],[1],[2]]}"#], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["newton_polytope"]["vertices"], json!([["0", "2", "0"], ["1", "0", "1"]]));
}

#[test]
fn unimodular_triangle_is_dual_defective() {
    let o = polydisc(&["degree", "--config", r#"{"dim":2,"points":[[0,0],[1,0],[0,1]]}"#], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o), json!({ "degree": 0, "dual_defect": true }));
}

#[test]
fn oracle_matches_cubic() {
    // disc(c0 + c1 y + c2 y^2 + c3 y^3) has degree 4
    let o = polydisc(&["oracle-disc", "--config", r#"{"dim":1,"points":[[0],[1],[2],[3]]}"#], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["degree"], 4);
    assert_eq!(v["terms"].as_array().unwrap().len(), 5);
}

#[test]
fn malformed_input_exits_with_two() {
    let o = polydisc(&["degree", "--config", "{\"dim\": 1}"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_of(&o)["error"]["kind"], "Schema");
    let o = polydisc(&["hull", "--in", "-"], Some("not json"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(polydisc(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(polydisc(&["hull"], None).status.code(), Some(2));
}

#[test]
fn failed_precondition_exits_with_one() {
    // two split polytopes are needed over a one-dimensional base
    let o = polydisc(&["mixed-fiber", "--config", r#"[{"n":1,"k":1,"polytope":[[0,0],[1,0],[0,1]]}]"#], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(json_of(&o)["error"]["message"].is_string());
}

#[test]
fn output_is_deterministic() {
    let args = [
        "mixed-fiber",
        "--config",
        r#"[{"n":1,"k":1,"polytope":[[0,0],[2,0],[0,2]]},{"n":1,"k":1,"polytope":[[0,0],[1,1],[3,1]]}]"#,
    ];
    let first = polydisc(&args, None);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    for _ in 0..3 {
        assert_eq!(polydisc(&args, None).stdout, first.stdout);
    }
}
