use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kpower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpower"))
        .args(args)
        .env_remove("KPOWER_SEED")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = kpower(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn sample_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    assert!(kpower(&["sample", "gnp", "--n", "30", "--p", "0.4", "--seed", "7", "--out", &g]).status.success());
    let a = std::fs::read_to_string(&g).unwrap();
    let b = kpower(&["sample", "gnp", "--n", "30", "--p", "0.4", "--seed", "7"]).stdout;
    assert_eq!(a.as_bytes(), b.as_slice());
    let env = Command::new(env!("CARGO_BIN_EXE_kpower"))
        .args(["sample", "gnp", "--n", "30", "--p", "0.4"])
        .env("KPOWER_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(env.stdout, b);
    assert_eq!(a.lines().next().unwrap().split_whitespace().next(), Some("30"));
}

#[test]
fn absorber_build_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "a.txt");
    assert!(kpower(&["absorber", "build", "--j", "3", "--l", "4", "--k", "2", "--out", &f]).status.success());
    let v = ok_json(&["absorber", "verify", "--in", &f]);
    assert_eq!(v["passed"], true);
    let text = std::fs::read_to_string(&f).unwrap();
    let broken: String = text.lines().skip(1).collect::<Vec<_>>().join("\n");
    std::fs::write(&f, broken).unwrap();
    assert_eq!(kpower(&["absorber", "verify", "--in", &f]).status.code(), Some(2));
}

#[test]
fn density_commands() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "k5.txt");
    let edges: Vec<String> = (0..5).flat_map(|u| (u + 1..5).map(move |v| format!("{u} {v}"))).collect();
    std::fs::write(&g, format!("5 10\n{}\n", edges.join("\n"))).unwrap();
    for m in ["exhaustive", "parametric"] {
        let v = ok_json(&["density", "d1max", "--in", &g, "--method", m]);
        assert_eq!(v["value"], "5/2");
        let v = ok_json(&["density", "d2max", "--in", &g, "--method", m]);
        assert_eq!(v["value"], "10/3");
    }
    let q = path(dir.path(), "q.txt");
    std::fs::write(&q, "3 2 2\n0 1 1\n0 1 1\n0 2 -1\n").unwrap();
    let v = ok_json(&["density", "phi", "--pattern", &q, "--n0", "4", "--n", "10", "--t", "1", "--k", "2", "--p", "0.5"]);
    assert!(v["value"].as_f64().is_some());
    assert!(!kpower(&["density", "phi", "--pattern", &q, "--n0", "4", "--n", "10", "--t", "1", "--k", "3", "--p", "0.5"]).status.success());
}

#[test]
fn link_and_factor() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    assert!(kpower(&["sample", "gnp", "--n", "80", "--p", "0.7", "--seed", "3", "--out", &g]).status.success());
    let pairs = path(dir.path(), "pairs.txt");
    std::fs::write(&pairs, "0 1 2 3\n4 5 6 7\n").unwrap();
    let v = ok_json(&["link", "--host", &g, "--pairs", &pairs, "--s", "8", "--seed", "1"]);
    assert_eq!(v["linked"], 2);
    assert_eq!(v["linkages"][0]["order"].as_array().unwrap().len(), 8);
    let v = ok_json(&["factor", "--host", &g, "--pattern", "pathpower:10,2", "--count", "3"]);
    assert_eq!(v["mappings"].as_array().unwrap().len(), 3);
    assert!(!kpower(&["factor", "--host", &g, "--pattern", "star:3", "--count", "1"]).status.success());
}

#[test]
fn solve_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "cfg.json");
    std::fs::write(&cfg, r#"{"schema_version": 1, "absorber_fraction": 0.5, "s_link": 2}"#).unwrap();
    let cert = path(dir.path(), "cert.txt");
    let v = ok_json(&[
        "solve", "--n", "500", "--p", "1", "--k", "2", "--seed", "2", "--config", &cfg, "--certificate", &cert, "--brief",
    ]);
    assert_eq!(v["outcome"]["status"], "success");
    assert_eq!(v["certificate"].as_array().unwrap().len(), 500);
    let line = std::fs::read_to_string(&cert).unwrap();
    assert_eq!(line.split_whitespace().count(), 500);
    let fail = kpower(&["solve", "--n", "500", "--p", "0.01", "--seed", "2"]);
    assert_eq!(fail.status.code(), Some(1));
    let f: Value = serde_json::from_slice(&fail.stdout).unwrap();
    assert_eq!(f["outcome"]["status"], "failure");
    assert!(f["trace"].is_object());

    let g = path(dir.path(), "g.txt");
    assert!(kpower(&["sample", "gnp", "--n", "10", "--p", "1", "--out", &g]).status.success());
    let v = ok_json(&["oracle", "--in", &g, "--k", "2"]);
    assert_eq!(v["contains"], true);
    let c = path(dir.path(), "c.txt");
    std::fs::write(&c, v["certificate"].as_str().unwrap()).unwrap();
    assert_eq!(ok_json(&["oracle", "--in", &g, "--k", "2", "--check", &c])["valid"], true);
    let empty = path(dir.path(), "e.txt");
    std::fs::write(&empty, "10 0\n").unwrap();
    assert_eq!(ok_json(&["oracle", "--in", &empty, "--k", "2"])["contains"], false);
}

#[test]
fn sweep_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let spec = path(dir.path(), "spec.json");
    std::fs::write(
        &spec,
        r#"{"schema_version": 1, "n_values": [8], "p_grid": {"explicit": [0.0, 1.0]}, "k": 2, "trials": 1,
            "mode": "oracle", "seed_base": 4}"#,
    )
    .unwrap();
    let out = path(dir.path(), "run");
    let r = kpower(&["sweep", "--spec", &spec, "--out", &out, "--threads", "2"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let summary = std::fs::read_to_string(Path::new(&out).join("summary.csv")).unwrap();
    let rates: Vec<&str> = summary.lines().skip(1).map(|l| l.split(',').nth(7).unwrap()).collect();
    assert_eq!(rates, ["0.000000", "1.000000"]);
    let rec = path(dir.path(), "run/records.jsonl");
    let v = ok_json(&["replay", "--in", &rec]);
    assert_eq!(v["replayed"], 2);
    assert_eq!(v["mismatched"].as_array().unwrap().len(), 0);
}
