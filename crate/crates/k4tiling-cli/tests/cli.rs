use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_k4tiling"));
    c.env_remove("TILING_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn construct_reports_edges_and_graph6() {
    let out = run(&["construct", "--family", "E1", "--n", "13", "--k", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["edges"], 60);
    assert_eq!(v["result"]["formula"], 60);
    let g = k4tiling::io::from_graph6(v["result"]["graph6"].as_str().unwrap()).unwrap();
    assert_eq!(g.edge_count(), 60);

    let raw = run(&[
        "construct",
        "--family",
        "E4",
        "--n",
        "8",
        "--k",
        "1",
        "--format",
        "graph6",
    ]);
    let g = k4tiling::io::from_graph6(std::str::from_utf8(&raw.stdout).unwrap()).unwrap();
    assert_eq!(g.edge_count(), 25);

    let wide = json(&run(&[
        "construct",
        "--family",
        "E3",
        "--n",
        "300",
        "--k",
        "10",
        "--formula-only",
    ]));
    assert!(wide["result"]["formula"].as_u64().unwrap() > 0);
    assert_eq!(
        run(&["construct", "--family", "E3", "--n", "300", "--k", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn ex_and_nu() {
    let v = json(&run(&["ex", "--n", "7", "--k", "1"]));
    assert_eq!(v["result"]["value"], 21);
    assert!(v["result"]["witness_graph6"].is_string());
    let v = json(&run_with_stdin(
        &["nu", "--r", "4", "--all", "100"],
        "G~~~~{\n",
    ));
    assert_eq!(v["result"]["nu"], 2);
    assert_eq!(v["result"]["tilings"].as_array().unwrap().len(), 35);
    let edges = "5 4\n0 1\n1 2\n2 3\n3 4\n";
    let v = json(&run(&["nu", "--r", "2", "--graph", edges]));
    assert_eq!(v["result"]["nu"], 2);
}

#[test]
fn packing_classify_audit_pipeline() {
    let g6 = run(&[
        "construct",
        "--family",
        "E2",
        "--n",
        "14",
        "--k",
        "2",
        "--format",
        "graph6",
    ])
    .stdout;
    let g6 = String::from_utf8(g6).unwrap();
    let p = json(&run_with_stdin(&["packing"], &g6));
    assert_eq!(p["result"]["sizes"]["a"], 2);
    let c = json(&run_with_stdin(&["classify"], &g6));
    assert_eq!(
        c["result"]["profile"]["a"],
        serde_json::json!([0, 2, 0, 0, 0, 0])
    );
    let a = run_with_stdin(&["audit"], &g6);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["result"]["pass"], true);
}

#[test]
fn verification_commands() {
    let out = run(&["verify-appendix", "--gamma", "7.6", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let eta = &v["result"]["reports"][0];
    assert!(eta["value"].as_f64().unwrap() <= 151.0 / 150.0 + 1e-6);
    assert_eq!(eta["pass"], true);

    let v = json(&run(&[
        "verify-opt",
        "--prop",
        "phi23",
        "--k",
        "0.2",
        "--samples",
        "2000",
    ]));
    assert_eq!(v["result"]["pass"], true);
    let out = run(&["verify-opt", "--prop", "phi23", "--k", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("phi23"));
    let v = json(&run(&[
        "verify-opt",
        "--prop",
        "identities",
        "--samples",
        "2000",
    ]));
    assert_eq!(v["result"]["reports"].as_array().unwrap().len(), 15);
}

#[test]
fn xi_and_sweep() {
    let v = json(&run(&["xi", "--n", "6", "--k", "1"]));
    assert_eq!(v["result"]["regime"], 2);
    assert_eq!(v["result"]["exact"], "14/1");
    let v = json(&run(&["sweep", "--n", "52"]));
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["best_edges"], 52 * 52 / 3);
    let at = rows.iter().find(|r| r["k"] == 8).unwrap();
    assert!(at["gap"].as_f64().unwrap().abs() <= 3.0 / 52.0);
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["construct", "--family", "E9", "--n", "5", "--k", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["ex", "--n", "10", "--k", "1"]).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["xi", "--n", "4", "--k", "3"]).status.code(), Some(2));
    assert_eq!(
        run_with_stdin(&["nu"], "not a graph").status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["--threads", "0", "xi", "--n", "4", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["xi", "--n", "4", "--k", "1", "--format", "graph6"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = [
        "verify-opt",
        "--prop",
        "phi1-a1234",
        "--k",
        "0.05",
        "--samples",
        "30000",
    ];
    let one = bin().args(["--threads", "1"]).args(args).output().unwrap();
    let many = bin()
        .env("TILING_THREADS", "4")
        .args(args)
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(run(&args).stdout, one.stdout);
}

#[test]
fn writes_to_file_and_text() {
    let dir = std::env::temp_dir().join(format!("k4tiling-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("xi.json");
    let out = run(&[
        "xi",
        "--n",
        "1",
        "--k",
        "0.25",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["result"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).unwrap();
    let text =
        String::from_utf8(run(&["xi", "--n", "1", "--k", "0", "--format", "text"]).stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("result.regime: 1")));
}
