use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const REGULAR: &str =
    r#"{"boundary":{"a11":1,"a10":2,"b11":-1,"b10":3,"a20":1,"b20":2},"q":{"kind":"poly","coeffs":[0,1,-1]}}"#;
const FIRST_ORDER: &str =
    r#"{"boundary":{"a11":1,"a10":1,"b11":1,"b10":0,"a20":1,"b20":-1},"q":{"kind":"poly","coeffs":["1/2",3]}}"#;
const LINEAR: &str = r#"{"boundary":{"a11":1,"a10":0,"b11":1,"b10":0,"a20":1,"b20":-1},"q":{"kind":"poly","coeffs":[0,1]},"order_cap":3}"#;
const DIRICHLET: &str =
    r#"{"boundary":{"a11":0,"a10":1,"b11":0,"b10":0,"a20":0,"b20":1},"q":{"kind":"poly","coeffs":[0]}}"#;
const RANK_ONE: &str =
    r#"{"boundary":{"a11":1,"a10":0,"b11":0,"b10":0,"a20":0,"b20":0},"q":{"kind":"poly","coeffs":[1]}}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace { dir: TempDir::new().unwrap() }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn specreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specreg")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_regular_and_first_order() {
    let ws = Workspace::new();
    let out = specreg(&["classify", arg(&ws.file("regular.json", REGULAR))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with(r#"{"class":"BirkhoffRegular""#), "{}", stdout(&out));

    let out = specreg(&["classify", arg(&ws.file("m1.json", FIRST_ORDER))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{\"class\":\"AlmostRegular\",\"order\":1,\"route\":\"both-agree\"}\n");
}

#[test]
fn classify_routes_and_evidence() {
    let ws = Workspace::new();
    let input = ws.file("linear.json", LINEAR);
    for route in ["theorem", "delta", "both"] {
        let out = specreg(&["classify", arg(&input), "--route", route]);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains(r#""order":2"#), "{route}: {}", stdout(&out));
    }
    let out = specreg(&["classify", arg(&input), "--evidence"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let evidence = v["evidence"].as_array().unwrap();
    assert!(evidence.iter().any(|e| e["route"] == "theorem"));
    assert!(evidence.iter().any(|e| e["route"] == "delta" && e["value"] == "1/2" && e["satisfied"] == false));
}

#[test]
fn backends_agree() {
    let ws = Workspace::new();
    for (name, text) in [("a", REGULAR), ("b", FIRST_ORDER), ("c", LINEAR)] {
        let input = ws.file(name, text);
        let exact = specreg(&["classify", arg(&input), "--backend", "rational"]);
        let float = specreg(&["classify", arg(&input), "--backend", "float"]);
        assert_eq!(exact.status.code(), Some(0));
        assert_eq!(stdout(&exact), stdout(&float), "{name}");
    }
}

#[test]
fn generated_problems_classify_as_intended() {
    let ws = Workspace::new();
    for seed in 0..10 {
        let path = ws.path(&format!("gen{seed}.json"));
        let out = specreg(&["gen", "--seed", &seed.to_string(), "-o", arg(&path)]);
        assert_eq!(out.status.code(), Some(0));
        let intended = String::from_utf8(out.stderr).unwrap();
        let class = intended.trim().strip_prefix("intended class: ").unwrap().to_string();
        let verdict = stdout(&specreg(&["classify", arg(&path)]));
        let v: serde_json::Value = serde_json::from_str(&verdict).unwrap();
        let got = match v["order"].as_u64() {
            Some(m) => format!("{}({m})", v["class"].as_str().unwrap()),
            None => v["class"].as_str().unwrap().to_string(),
        };
        assert_eq!(got, class, "seed {seed}");
    }
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    let malformed = specreg(&["classify", arg(&ws.file("bad.json", "{\"boundary\": "))]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(String::from_utf8(malformed.stderr).unwrap().contains("line"));

    let degenerate = specreg(&["classify", arg(&ws.file("rank1.json", RANK_ONE))]);
    assert_eq!(degenerate.status.code(), Some(2));

    let unknown = specreg(&["classify", arg(&ws.file("extra.json", r#"{"boundary":{},"q":{},"colour":1}"#))]);
    assert_eq!(unknown.status.code(), Some(2));

    let missing = specreg(&["classify", arg(&ws.path("nowhere.json"))]);
    assert_eq!(missing.status.code(), Some(2));

    let regular = ws.file("regular.json", REGULAR);
    assert_eq!(specreg(&["validate", arg(&regular), "--points", "2"]).status.code(), Some(2));
    assert_eq!(specreg(&["validate", arg(&regular), "--lambda-min", "1"]).status.code(), Some(2));
    assert_eq!(specreg(&["expand", arg(&ws.file("linear.json", LINEAR)), "--order", "4"]).status.code(), Some(2));
}

#[test]
fn expand_round_trips_byte_identically() {
    let ws = Workspace::new();
    let out_path = ws.path("expansion.json");
    let out = specreg(&["expand", arg(&ws.file("linear.json", LINEAR)), "--order", "3", "-o", arg(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&out_path).unwrap();
    let parsed = specreg_core::io::parse_expansion(&text).unwrap();
    assert_eq!(specreg_core::io::to_canonical_string(&parsed.to_json()), text);

    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["delta"]["minus"][2], serde_json::json!(["1/2", "0"]));
    assert_eq!(v["delta"]["minus"][3], serde_json::json!(["5/8", "0"]));
}

#[test]
fn expand_without_potential_has_trivial_corrections() {
    let ws = Workspace::new();
    let out = specreg(&["expand", arg(&ws.file("free.json", DIRICHLET)), "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for entry in v["g"].as_array().unwrap() {
        if entry["s"].as_u64().unwrap() >= 1 {
            assert_eq!(entry["function"]["coeffs"], serde_json::json!([]), "{entry}");
        }
    }
}

#[test]
fn validate_reports_slopes_and_csv() {
    let ws = Workspace::new();
    let csv = ws.path("report.csv");
    let input = ws.file("dirichlet_q.json", &DIRICHLET.replace("[0]", "[0,1,-1]"));
    let out = specreg(&["validate", arg(&input), "--order", "1", "-o", arg(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let slopes: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("i="))
        .filter_map(|l| l.split("slope ").nth(1))
        .map(|s| s.trim().parse().unwrap())
        .collect();
    assert_eq!(slopes.len(), 8, "{text}");
    assert!(slopes.iter().all(|s| (s + 2.0).abs() < 0.5), "{slopes:?}");
    let table = fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("re_lambda,im_lambda,i,nu,max_eta,bound_pred\n"));
    assert_eq!(table.lines().count(), 1 + 8 * 4);

    let free = specreg(&["validate", arg(&ws.file("free.json", DIRICHLET))]);
    assert_eq!(free.status.code(), Some(0));
    assert_eq!(stdout(&free).matches("below solver noise").count(), 8);
}

#[test]
fn spectrum_of_the_free_dirichlet_problem() {
    let ws = Workspace::new();
    let input = ws.file("free.json", DIRICHLET);
    let out = specreg(&["spectrum", arg(&input), "--re", "-1..1", "--im", "0..10", "--grid", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let roots: Vec<[f64; 2]> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(roots.len(), 3);
    for (k, r) in roots.iter().enumerate() {
        assert!(r[0].abs() < 1e-8 && (r[1] - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-8, "{r:?}");
    }

    let shifted = ws.file("shifted.json", &DIRICHLET.replace("[0]", "[3]"));
    let out = specreg(&["spectrum", arg(&shifted), "--re", "-1..1", "--im", "0..10", "--grid", "32"]);
    let roots: Vec<[f64; 2]> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(roots.len(), 3);
    assert!((roots[0][1] - (std::f64::consts::PI.powi(2) - 3.0).sqrt()).abs() < 1e-8);

    let empty = specreg(&["spectrum", arg(&input), "--re", "0.5..0.5", "--im", "0..10"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(stdout(&empty), "[]\n");

    let inverted = specreg(&["spectrum", arg(&input), "--re", "1..-1", "--im", "0..10"]);
    assert_eq!(inverted.status.code(), Some(2));
}

#[test]
fn thread_count_from_environment() {
    let ws = Workspace::new();
    let input = ws.file("regular.json", REGULAR);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_specreg"))
            .args(["classify", arg(&input)])
            .env("SPECREG_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(run("1").status.code(), Some(0));
    assert_eq!(run("zero").status.code(), Some(2));
}
