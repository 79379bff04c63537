use std::fs;
use std::path::PathBuf;

use dirflow::cli::{run, EXIT_HYPOTHESIS, EXIT_OK, EXIT_PARSE};
use dirflow::rational::rat;
use dirflow::{Network, SolveReport};
use serde_json::{json, Value};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirflow-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, v: &Value) -> String {
    let p = scratch(name);
    fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["dirflow"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn chain_network() -> Value {
    json!({"nodes": ["s", "x", "t"], "terminals": ["s", "t"], "edges": [["s", "x", 1], ["x", "t", 1]]})
}

#[test]
fn solve_single_commodity_uses_mcc() {
    let net = write("chain.json", &chain_network());
    let mu = write("chain_mu.json", &json!({"elements": ["s", "t"], "rows": [[0, 1], [0, 0]]}));
    let (code, out, _) = call(&["solve", &net, &mu]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["value"], json!({"num": 1, "den": 1}));
    assert_eq!(v["method"], "mcc");
    let parsed = Network::from_json(&chain_network()).unwrap();
    let report = SolveReport::from_json(&v, &parsed).unwrap();
    assert_eq!(report.value, rat(1));
    assert_eq!(report.to_json(&parsed), v);
}

#[test]
fn classify_all_one() {
    let mu = write("all_one.json", &json!({"elements": ["s", "t", "u"], "rows": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}));
    let dot = scratch("tree.dot");
    let (code, out, _) = call(&["classify", &mu, "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["interval_representation"]["none"].is_object());
    let tree = &v["oriented_tree_realization"];
    assert_eq!(tree["nodes"].as_array().unwrap().len(), 4);
    assert_eq!(tree["cut_decomposition"].as_array().unwrap().len(), 3);
    assert_eq!(v["witnesses"]["T"]["dimension"], 2);
    assert!(fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn lock_then_verify() {
    let net = json!({
        "nodes": ["s", "t", "u", "x"],
        "terminals": ["s", "t", "u"],
        "edges": [["s", "x", 2], ["x", "t", 1], ["x", "u", 1], ["t", "s", 1], ["u", "s", 1]]
    });
    let net_path = write("lock_net.json", &net);
    let family = write("family.json", &json!([{"A": ["s"], "B": ["t", "u"]}, {"A": ["s", "t"], "B": ["u"]}]));
    let flow = scratch("flow.json");
    let (code, _, err) = call(&["lock", &net_path, &family, "--json", flow.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, out, _) = call(&["verify", &net_path, &family, flow.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("true"));
}

#[test]
fn exit_codes() {
    let (code, _, _) = call(&["gen"]);
    assert_eq!(code, EXIT_PARSE);
    let (code, _, _) = call(&["solve", "/nonexistent/file.json"]);
    assert_eq!(code, EXIT_PARSE);
    let bad = write("bad.json", &json!({"elements": ["s"], "rows": [[1]]}));
    let (code, _, _) = call(&["classify", &bad]);
    assert_eq!(code, EXIT_PARSE);
    let net = write("tri.json", &json!({"nodes": ["s", "t", "u"], "terminals": ["s", "t", "u"], "edges": [["s", "t", 1]]}));
    let mu = write("tri_mu.json", &json!({"elements": ["s", "t", "u"], "rows": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}));
    let (code, _, err) = call(&["solve", &net, &mu, "--method", "mcc"]);
    assert_eq!(code, EXIT_HYPOTHESIS);
    assert!(err.contains("interval"));
}

#[test]
fn gen_solve_pipeline_agrees_across_methods() {
    let inst = scratch("inst.json");
    let (code, _, _) = call(&["gen", "--seed", "5", "--weight", "all_one", "--eulerian", "inner", "--json", inst.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let path = inst.to_str().unwrap();
    let (_, auto, _) = call(&["solve", path]);
    let (_, lp, _) = call(&["solve", path, "--method", "lp"]);
    let (_, tree, _) = call(&["solve", path, "--method", "tree"]);
    let value = |s: &str| serde_json::from_str::<Value>(s).unwrap()["value"].clone();
    assert_eq!(value(&auto), value(&lp));
    assert_eq!(value(&tree), value(&lp));
}

#[test]
fn probe_prints_json_lines() {
    let (code, out, _) = call(&["probe", "--seed", "1", "--count", "3"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0]["value"]["den"].is_number());
}
