use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn chebfilter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebfilter"))
        .args(args)
        .env_remove("CHEBFILTER_THREADS")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))).unwrap()
}

fn csv_rows(p: PathBuf) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write_dataset(dir: &Path, edges: &str, features: &str, labels: &str) -> [String; 3] {
    let names = ["edges.txt", "features.csv", "labels.txt"];
    for (name, body) in names.iter().zip([edges, features, labels]) {
        fs::write(dir.join(name), body).unwrap();
    }
    names.map(|n| dir.join(n).to_str().unwrap().to_string())
}

fn data_flags(paths: &[String; 3]) -> Vec<&str> {
    vec!["--edges", &paths[0], "--features", &paths[1], "--labels", &paths[2]]
}

#[test]
fn approx_orders_runge_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("approx");
    let o = chebfilter(&["approx", "--fn", "runge", "--bases", "chebyshev,equispaced-lagrange", "--orders", "10,20", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(out.join("approx.csv"));
    let err = |basis: &str, k: &str| -> f64 {
        rows.iter().find(|r| r[0] == basis && r[1] == k).unwrap()[2].parse().unwrap()
    };
    assert!(err("chebyshev", "20") < err("chebyshev", "10"));
    assert!(err("lagrange", "20") > err("lagrange", "10"));
    let header = fs::read_to_string(out.join("approx.csv")).unwrap();
    assert!(header.starts_with("basis,K,max_error,node_scheme\n"));

    let manifest = read_json(out.join("manifest.json"));
    assert_eq!(manifest["command"], "approx");
    assert_eq!(manifest["outputs"][0], "approx.csv");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn approx_constant_function_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = chebfilter(&["approx", "--fn", "poly:0.75", "--orders", "1,4,9", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(out.join("approx.csv"));
    assert_eq!(rows.len(), 12);
    for r in rows {
        assert!(r[2].parse::<f64>().unwrap() <= 1e-12, "{r:?}");
    }
}

#[test]
fn approx_rejects_unknown_function() {
    let dir = tempfile::tempdir().unwrap();
    let o = chebfilter(&["approx", "--fn", "sawtooth", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ring_demo_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ring");
    assert!(chebfilter(&["ring-demo", "--n", "12", "--out", path_str(&out)]).status.success());
    let rows = csv_rows(out.join("ring_demo.csv"));
    assert_eq!(rows.len(), 12);
    let col = |j: usize| -> Vec<f64> { rows.iter().map(|r| r[j].parse().unwrap()).collect() };
    let low = col(2);
    assert!(low.iter().all(|v| (v - low[0]).abs() < 1e-10));
    let high = col(3);
    for i in 0..12 {
        assert!(high[i] * high[(i + 1) % 12] < 0.0);
    }
}

#[test]
fn ring_demo_empty_band_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ring3");
    let o = chebfilter(&["ring-demo", "--n", "3", "--out", path_str(&out)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no eigenvalue"));
    let manifest = read_json(out.join("manifest.json"));
    assert_eq!(manifest["warnings"].as_array().unwrap().len(), 2);
}

#[test]
fn recover_ring_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec");
    let o = chebfilter(&["recover", "--ring", "9", "--seed", "3", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(out.join("filter.csv"));
    assert_eq!(rows.len(), 9);
    assert_eq!(read_json(out.join("manifest.json"))["seeds"][0], 3);
}

#[test]
fn recover_failures() {
    let dir = tempfile::tempdir().unwrap();
    let ring = "0 1\n1 2\n2 3\n3 0\n";
    // a constant signal is orthogonal to every non-constant eigenvector
    let paths = write_dataset(dir.path(), ring, "1\n1\n1\n1\n", "0\n1\n0\n1\n");
    let mut args = vec!["recover"];
    args.extend(data_flags(&paths));
    let out = dir.path().join("o");
    args.extend(["--out", path_str(&out)]);
    let o = chebfilter(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("orthogonal"));

    let paths = write_dataset(dir.path(), ring, "1\n2\n3\n5\n", "0\n1\n2\n1\n");
    let mut args = vec!["recover"];
    args.extend(data_flags(&paths));
    args.extend(["--out", path_str(&out)]);
    assert_eq!(chebfilter(&args).status.code(), Some(1));
}

fn small_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn train_synthetic_smoke_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), r#"{"K": 6, "hidden": 32, "epochs": 300, "patience": 100}"#);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = chebfilter(&[
            "train", "--synthetic", "heterophilic", "--regime", "full", "--config", &cfg, "--seed", "1", "--out",
            path_str(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a");
    let b = run("b");
    let report = read_json(a.join("report.json"));
    assert_eq!(report["model"], "chebnet2");
    assert!(report["test_acc"].as_f64().unwrap() >= 0.9, "{}", report["test_acc"]);
    assert_eq!(report["config"]["K"], 6);
    for f in ["history.csv", "filter.csv", "checkpoint.json", "manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let manifest = read_json(a.join("manifest.json"));
    assert_eq!(manifest["inputs"][0]["path"].as_str().unwrap(), cfg);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(fs::read_to_string(a.join("history.csv")).unwrap().starts_with("epoch,train_loss,val_acc\n"));
}

#[test]
fn train_repeated_runs_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), r#"{"model": "gcn", "epochs": 40, "patience": 40}"#);
    let run = |jobs: &str| {
        let out = dir.path().join(format!("jobs{jobs}"));
        let o = chebfilter(&[
            "train", "--synthetic", "homophilic", "--n", "120", "--regime", "full", "--config", &cfg, "--runs", "3",
            "--jobs", jobs, "--out", path_str(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        read_json(out.join("report.json"))
    };
    let one = run("1");
    let three = run("3");
    assert_eq!(one["accuracies"], three["accuracies"]);
    assert_eq!(one["runs"], 3);
    assert!(dir.path().join("jobs3/history_run2.csv").exists());
    let seeds: Vec<u64> = three["reports"].as_array().unwrap().iter().map(|r| r["config"]["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, vec![0, 1, 2]);
}

#[test]
fn train_missing_feature_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let paths = write_dataset(dir.path(), "0 1\n", "1\n2\n", "0\n1\n");
    let missing = dir.path().join("nope.csv");
    let o = chebfilter(&[
        "train", "--edges", &paths[0], "--features", path_str(&missing), "--labels", &paths[2], "--out",
        path_str(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.csv"));
}

#[test]
fn train_invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), r#"{"dropout_linear": 1.5}"#);
    let o = chebfilter(&["train", "--synthetic", "homophilic", "--config", &cfg, "--regime", "full", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = small_config(dir.path(), r#"{"dropout": 0.5}"#);
    let o = chebfilter(&["train", "--synthetic", "homophilic", "--config", &cfg, "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn standard_split_needs_enough_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let o = chebfilter(&["train", "--synthetic", "homophilic", "--model", "mlp", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacity"));
}

#[test]
fn stats_two_node_graph() {
    let dir = tempfile::tempdir().unwrap();
    let paths = write_dataset(dir.path(), "0 1\n", "1,0,2\n0,1,2\n", "0\n1\n");
    let out = dir.path().join("s");
    let mut args = vec!["stats"];
    args.extend(data_flags(&paths));
    args.extend(["--out", path_str(&out)]);
    let o = chebfilter(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats = read_json(out.join("stats.json"));
    assert_eq!(stats["n"], 2);
    assert_eq!(stats["m"], 1);
    assert_eq!(stats["f"], 3);
    assert_eq!(stats["C"], 2);
    assert_eq!(stats["homophily"], 0.0);
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, stats);
    let manifest = read_json(out.join("manifest.json"));
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 3);
}

#[test]
fn stats_label_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let paths = write_dataset(dir.path(), "0 1\n", "1\n2\n", "0\n1\n1\n");
    let mut args = vec!["stats"];
    args.extend(data_flags(&paths));
    args.extend(["--out", path_str(dir.path())]);
    assert_eq!(chebfilter(&args).status.code(), Some(2));
}

#[test]
fn bad_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_chebfilter"))
        .args(["ring-demo", "--out", path_str(dir.path())])
        .env("CHEBFILTER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
