mod common;

use std::process::{Command, Output};

use common::data;

fn hqaco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqaco")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).lines().next().unwrap()).unwrap()
}

#[test]
fn solve_triangle() {
    let o = hqaco(&["solve", data("triangle.graph").to_str().unwrap(), "--ants", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["found_cost"], 3.0);
}

#[test]
fn solve_path_has_no_cycle() {
    let o = hqaco(&["solve", data("path3.graph").to_str().unwrap(), "--ants", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(json(&o)["found_cost"].is_null());
}

#[test]
fn solve_burma14_report() {
    let file = data("burma14.tsp");
    let args = ["solve", file.to_str().unwrap(), "--ants", "1000", "--alpha", "0.4", "--beta", "0.6", "--rho", "0.01", "--shots", "10", "--seed", "7"];
    let o = hqaco(&args);
    assert_eq!(o.status.code(), Some(0));
    let row = json(&o);
    assert_eq!(row["nodes"], 14);
    assert_eq!(row["reference"], 3323.0);
    assert_eq!(row["qubits_start"], 4);
    assert_eq!(row["qubits_step"], 4);
    let found = row["found_cost"].as_f64().unwrap();
    let shown = row["error_percent"].as_f64().unwrap();
    assert!((shown - 100.0 * (found - 3323.0) / 3323.0).abs() <= 0.005);
    let path: Vec<usize> = row["found_path"].as_str().unwrap().split('-').map(|n| n.parse().unwrap()).collect();
    assert_eq!(path.len(), 15);
    assert_eq!(path.first(), path.last());
}

#[test]
fn samplers_accept_the_same_flags() {
    let file = data("gr17.tsp");
    for sampler in ["quantum", "classical"] {
        let args = ["solve", file.to_str().unwrap(), "--ants", "20", "--shots", "3", "--seed", "1", "--parallel", "2", "--sampler", sampler, "--output", "csv"];
        let o = hqaco(&args);
        assert_eq!(o.status.code(), Some(0), "{sampler}");
        assert!(stdout(&o).starts_with("instance,nodes,reference,found_cost,found_path,error_percent,qubits_start,qubits_step,seed,elapsed\n"));
    }
}

#[test]
fn bad_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsp");
    std::fs::write(&bad, "NAME: bad\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 1\n").unwrap();
    let o = hqaco(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(hqaco(&["solve", "/nonexistent/x.tsp"]).status.code(), Some(1));
}

#[test]
fn exact_subcommand() {
    let o = hqaco(&["exact", data("burma14.tsp").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["optimal_cost"], 3323.0);
    let o = hqaco(&["exact", data("gr17.tsp").to_str().unwrap()]);
    assert_eq!(json(&o)["optimal_cost"], 2085.0);
}

#[test]
fn exact_size_guard() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("k21.graph");
    let mut text = String::from("v 21\n");
    for i in 0..21 {
        for j in i + 1..21 {
            text.push_str(&format!("e {i} {j} 1\n"));
        }
    }
    std::fs::write(&file, text).unwrap();
    assert_eq!(hqaco(&["exact", file.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn bench_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = hqaco(&["bench", dir.path().to_str().unwrap(), "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.matches("SKIPPED").count(), 5);
}

#[test]
fn bench_sorts_by_error() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["burma14.tsp", "gr17.tsp"] {
        std::fs::copy(data(name), dir.path().join(name)).unwrap();
    }
    let o = hqaco(&["bench", dir.path().to_str().unwrap(), "--ants", "100", "--seeds", "2", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let errors: Vec<f64> = rows.iter().map(|r| r["error_percent"].as_f64().unwrap()).collect();
    assert!(errors[0] <= errors[1]);
    let gr17 = rows.iter().find(|r| r["instance"] == "gr17").unwrap();
    assert_eq!((gr17["qubits_start"].as_u64(), gr17["qubits_step"].as_u64()), (Some(5), Some(4)));
    assert!(rows.iter().all(|r| r["elapsed"].is_null()));
}

#[test]
fn dump_circuit_lists_gates() {
    let o = hqaco(&["--dump-circuit", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().next().unwrap().starts_with("RY t=0 theta="));
    assert_eq!(text.lines().filter(|l| l.starts_with("CNOT")).count(), 2);
}
