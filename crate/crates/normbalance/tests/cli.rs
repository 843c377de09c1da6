//! End-to-end checks of the command-line interface: exit codes, determinism,
//! and the documented file formats.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_normbalance"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn gen_random_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&[
            "gen", "random", "--m", "3", "--n", "4", "--seed", "1", "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same flags must generate identical bytes");
    normbalance::instance::load_instance(&a).expect("generated file parses");
}

#[test]
fn gen_setcover_rejects_uncoverable_elements() {
    let dir = tempfile::tempdir().unwrap();
    let sets = dir.path().join("sets.json");
    write(&sets, "[[1],[3]]");
    let out = run(&["gen", "setcover", "--sets", sets.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("forbidden on every machine"));
}

#[test]
fn solve_exact_matches_hand_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    // Two machines, two jobs, L1 loads, max objective: the diagonal
    // assignment gives max(1, 1) = 1; every other total assignment costs 4+.
    write(
        &inst,
        r#"{"m": 2, "n": 2,
            "p": [[1.0, 4.0], [4.0, 1.0]],
            "inner_norms": [{"kind": "l1"}, {"kind": "l1"}],
            "outer_norm": {"kind": "linf"}}"#,
    );
    let out = run(&["solve", "--algo", "exact", "--in", inst.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["objective"].as_f64().unwrap(), 1.0);
    assert_eq!(v["assignment"], serde_json::json!([1, 2]));
}

#[test]
fn solve_results_are_byte_identical_for_fixed_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let gen = run(&[
        "gen", "random", "--m", "2", "--n", "3", "--seed", "9", "--out",
        inst.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let args = ["solve", "--algo", "glb-direct", "--in", inst.to_str().unwrap(), "--seed", "4"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn compare_exact_reports_a_ratio_of_at_least_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let gen = run(&[
        "gen", "random", "--m", "2", "--n", "3", "--seed", "11", "--out",
        inst.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let out = run(&[
        "solve", "--algo", "glb-direct", "--in", inst.to_str().unwrap(), "--compare-exact",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["ratio_vs_exact"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert!(v["exact_opt"].as_f64().unwrap() > 0.0);
}

#[test]
fn maxtopk_on_the_wrong_shape_exits_with_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let gen = run(&[
        "gen", "random", "--m", "2", "--n", "2", "--seed", "1", "--norms", "l1-linf",
        "--out", inst.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let out = run(&["solve", "--algo", "maxtopk", "--in", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not GLB-MaxTopK"));
}

#[test]
fn selection_algorithms_read_the_selection_file() {
    let dir = tempfile::tempdir().unwrap();
    let sel = dir.path().join("sel.json");
    write(
        &sel,
        r#"{"p": [3.0, 1.0, 2.0, 0.5], "z": [1.0, 2.0, 1.5, 0.5], "Z": 3.0,
            "psi": {"kind": "l1"}}"#,
    );
    let exact = run(&["solve", "--algo", "normlin-exact", "--in", sel.to_str().unwrap()]);
    assert!(exact.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&exact)).unwrap();
    assert_eq!(v["items"], serde_json::json!([2, 3]));
    assert_eq!(v["cost"].as_f64().unwrap(), 3.0);

    let ptas = run(&[
        "solve", "--algo", "normlin-ptas", "--in", sel.to_str().unwrap(), "--compare-exact",
    ]);
    assert!(ptas.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&ptas)).unwrap();
    assert!(v["ratio_vs_exact"].as_f64().unwrap() <= 72.5);
    assert_eq!(v["bound"].as_f64().unwrap(), 72.5);
}

#[test]
fn verify_passes_and_handles_zero_trials() {
    let out = run(&["verify", "--trials", "50", "--seed", "2"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("0 failures"));

    let vacuous = run(&["verify", "--trials", "0"]);
    assert!(vacuous.status.success());
}

#[test]
fn bench_writes_the_documented_header_and_bounded_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(&[
        "bench", "--suite", "ratios", "--sizes", "2x2,2x3", "--seeds", "1,2", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance_id,m,n,algo,objective,exact_opt,ratio,bound,wall_ms"
    );
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9, "row: {line}");
        let ratio: f64 = fields[6].parse().unwrap();
        let bound: f64 = fields[7].parse().unwrap();
        assert!(ratio <= bound + 1e-9, "row: {line}");
        rows += 1;
    }
    assert_eq!(rows, 4);
}

#[test]
fn bench_with_no_seeds_writes_a_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    let out = run(&[
        "bench", "--suite", "setcover", "--sizes", "3x3", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text, "instance_id,m,n,algo,objective,exact_opt,ratio,bound,wall_ms\n");
}

#[test]
fn usage_errors_exit_with_code_two() {
    let unknown_algo = run(&["solve", "--algo", "nonsense", "--in", "x.json"]);
    assert_eq!(unknown_algo.status.code(), Some(2));
    let unknown_suite = run(&["bench", "--suite", "nonsense", "--out", "x.csv"]);
    assert_eq!(unknown_suite.status.code(), Some(2));
    let bad_size = run(&["bench", "--suite", "ratios", "--sizes", "2by2", "--seeds", "1", "--out", "/tmp/unused.csv"]);
    assert_eq!(bad_size.status.code(), Some(2));
}

#[test]
fn setcover_bench_reports_exact_integer_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sc.csv");
    let out = run(&[
        "bench", "--suite", "setcover", "--sizes", "4x5", "--seeds", "1,2,3", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let objective: f64 = fields[4].parse().unwrap();
        let exact: f64 = fields[5].parse().unwrap();
        assert_eq!(objective, exact, "row: {line}");
        assert_eq!(objective.fract(), 0.0);
    }
}
