use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quickim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quickim"))
        .args(args)
        .env_remove("QUICKIM_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const CHAIN: &str = "# a small chain with a branch\n10 20 0.5\n20 30 0.5\n10 40 0.2\n";

#[test]
fn seeds_selects_in_order_and_reports_labels() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", CHAIN);
    let v = json(&quickim(&["seeds", &g, "--k", "2", "--l", "2"]));
    assert_eq!(v["seeds"], serde_json::json!([10, 20]));
    assert_eq!(v["per_iteration"].as_array().unwrap().len(), 2);
    assert!(v.get("diagnostics").is_none() || v["diagnostics"].is_null());

    let v = json(&quickim(&["seeds", &g, "--k", "2", "-v"]));
    assert_eq!(v["diagnostics"]["violations"]["coefficient_sign"], 0);
}

#[test]
fn basic_and_mc_greedy_algorithms_run() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", CHAIN);
    let basic = json(&quickim(&["seeds", &g, "--k", "2", "--algo", "basic"]));
    let lazy = json(&quickim(&["seeds", &g, "--k", "2"]));
    assert_eq!(basic["seeds"], lazy["seeds"]);
    let mc = json(&quickim(&["seeds", &g, "--k", "1", "--algo", "mc-greedy", "--simulations", "2000"]));
    assert_eq!(mc["seeds"], serde_json::json!([10]));
}

#[test]
fn k_zero_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", CHAIN);
    assert_eq!(quickim(&["seeds", &g, "--k", "0"]).status.code(), Some(2));
    assert_eq!(quickim(&["seeds", &g, "--bogus"]).status.code(), Some(2));
    assert_eq!(quickim(&["nosuch"]).status.code(), Some(2));
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let self_loop = write(dir.path(), "loop.txt", "1 2 0.5\n3 3 0.5\n");
    let out = quickim(&["seeds", &self_loop, "--k", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let bad_p = write(dir.path(), "p.txt", "1 2 1.5\n");
    assert_eq!(quickim(&["scores", &bad_p]).status.code(), Some(3));

    let missing = dir.path().join("absent.txt");
    assert_eq!(quickim(&["scores", missing.to_str().unwrap()]).status.code(), Some(5));
}

#[test]
fn probs_tr_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = (0..200).map(|i| format!("{} {}\n", i, i + 1 + i % 7)).collect();
    let g = write(dir.path(), "g.txt", &body);
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for out in [&a, &b] {
        let o = quickim(&["probs", &g, out.to_str().unwrap(), "--model", "tr", "--rng-seed", "9"]);
        assert!(o.status.success());
    }
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().filter(|l| !l.starts_with('#')).all(|l| {
        let p: f64 = l.split_whitespace().nth(2).unwrap().parse().unwrap();
        [0.1, 0.01, 0.001].iter().any(|x| (p - x).abs() < 1e-12)
    }));
}

#[test]
fn probs_binary_round_trips_through_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", CHAIN);
    let bin = dir.path().join("g.bin");
    assert!(quickim(&["probs", &g, bin.to_str().unwrap(), "--model", "un", "--p-u", "0.3", "--binary"])
        .status
        .success());
    let from_bin = json(&quickim(&["scores", bin.to_str().unwrap()]));
    let text = json(&quickim(&["scores", &g, "--model", "un", "--p-u", "0.3"]));
    assert_eq!(from_bin["total"], text["total"]);
}

#[test]
fn oracle_on_thirty_edges_is_a_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = (0..30).map(|i| format!("{} {} 0.2\n", i, i + 1)).collect();
    let g = write(dir.path(), "g.txt", &body);
    let out = quickim(&["oracle", &g]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn oracle_reports_named_checks() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", CHAIN);
    let v = json(&quickim(&["oracle", &g, "--k", "2"]));
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"walk_pro") && names.contains(&"basic_lazy_seed_agreement"));
    let passed = |name: &str| {
        v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == name)
            .unwrap()["passed"]
            .as_bool()
            .unwrap()
    };
    assert!(passed("world_normalization") && passed("lazy_update_recompute"));
}

#[test]
fn eval_reads_seed_json_and_plain_lists() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", CHAIN);
    let seeds = dir.path().join("seeds.json");
    let o = quickim(&["seeds", &g, "--k", "1", "-o", seeds.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let from_json = json(&quickim(&["eval", &g, "--seeds", seeds.to_str().unwrap(), "--simulations", "5000"]));
    let plain = write(dir.path(), "seeds.txt", "10\n");
    let from_text = json(&quickim(&["eval", &g, "--seeds", &plain, "--simulations", "5000"]));
    assert_eq!(from_json["mean"], from_text["mean"]);
    // Exact spread of {10}: 1 + 0.5 + 0.25 + 0.2.
    let mean = from_json["mean"].as_f64().unwrap();
    assert!((mean - 1.95).abs() < 0.05, "{mean}");

    let unknown = write(dir.path(), "bad.txt", "99\n");
    assert_eq!(quickim(&["eval", &g, "--seeds", &unknown]).status.code(), Some(3));
}

#[test]
fn eval_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = (0..60)
        .flat_map(|i| [1, 7, 23].map(|d| format!("{} {}\n", i, (i + d) % 60)))
        .collect();
    let g = write(dir.path(), "g.txt", &body);
    let seeds = write(dir.path(), "s.txt", "0 1 2");
    let run = |threads: &str| {
        json(&quickim(&["eval", &g, "--seeds", &seeds, "--simulations", "3000", "--threads", threads]))
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn scores_formats() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", CHAIN);
    let v = json(&quickim(&["scores", &g, "--l", "2"]));
    let total: Vec<f64> = v["total"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(total, vec![0.95, 0.5, 0.0, 0.0]);
    let bin = quickim(&["scores", &g, "--l", "2", "--format", "binary"]);
    assert_eq!(bin.stdout.len(), 4 * 8);
    assert_eq!(f64::from_le_bytes(bin.stdout[..8].try_into().unwrap()), 0.95);
}

#[test]
fn bench_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = (0..400).map(|i| format!("{} {}\n", i % 80, (i * 13 + 7) % 81)).filter(|l| {
        let mut it = l.split_whitespace();
        it.next() != it.next()
    }).collect();
    let g = write(dir.path(), "g.txt", &body);
    let csv = dir.path().join("bench.csv");
    let v = json(&quickim(&[
        "bench", &g, "--k", "5", "--grid", "0.05,0.1", "--repeats", "1", "--csv", csv.to_str().unwrap(),
    ]));
    assert_eq!(v["grid"].as_array().unwrap().len(), 2);
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 3);
    assert_eq!(quickim(&["bench", &g, "--model", "wc"]).status.code(), Some(2));
}

#[test]
fn probs_un_writes_a_constant_column() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "1 2\n2 3\n3 1\n1 3\n");
    let out = dir.path().join("un.txt");
    assert!(quickim(&["probs", &g, out.to_str().unwrap(), "--model", "un", "--p-u", "0.1"]).status.success());
    let text = fs::read_to_string(out).unwrap();
    let column: Vec<&str> = text.lines().map(|l| l.split_whitespace().nth(2).unwrap()).collect();
    assert_eq!(column, vec!["0.1"; 4]);
}

#[test]
fn seeds_on_a_million_edge_graph() {
    let g = quickim::graph::generate::power_law(170_000, 6.0, 2.3, 3);
    assert!(g.edge_count() > 1_000_000);
    let body: String = g.edges().map(|(u, v, _)| format!("{u} {v}\n")).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "big.txt", &body);
    let v = json(&quickim(&["seeds", &path, "--k", "100", "--l", "3"]));
    assert_eq!(v["seeds"].as_array().unwrap().len(), 100);
    assert!(v["wall_seconds"].as_f64().unwrap() > 0.0);
}
