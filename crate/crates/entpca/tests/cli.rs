use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entpca_core::estimators::estimate_cols;
use entpca_core::pca::fit;
use entpca_core::Dataset;
use entpca_core::DenseMatrix;
use serde_json::Value;

fn entpca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entpca"))
        .args(args)
        .env_remove("ENTPCA_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// diag(2, 1) with items as columns: a_0 = (2, 0), a_1 = (0, 1).
fn fit_diag(dir: &Path) -> PathBuf {
    let csv = write(dir, "diag.csv", "2,0\n0,1\n");
    let model = dir.join("diag.epca");
    let o = entpca(&["fit", "--input", s(&csv), "--orientation", "items-as-columns", "--k", "1", "--output-model", s(&model)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    model
}

#[test]
fn fit_summary_on_diag() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "diag.csv", "2,0\n0,1\n");
    let model = dir.path().join("m.epca");
    let o = entpca(&["fit", "--input", s(&csv), "--orientation", "items-as-columns", "--k", "1", "--output-model", s(&model)]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["m"], 2);
    assert_eq!(v["n"], 2);
    assert_eq!(v["k"], 1);
    assert_eq!(v["delta"], 1.0);
    assert_eq!(v["sum_z"], 1.0);
    assert!(model.exists());
}

#[test]
fn fit_rank_out_of_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "diag.csv", "2,0\n0,1\n");
    let model = dir.path().join("m.epca");
    let o = entpca(&["fit", "--input", s(&csv), "--k", "2", "--output-model", s(&model)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rank"), "{}", stderr(&o));
}

#[test]
fn malformed_csv_exits_3_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "bad.csv", "1,2,3\n4,abc,6\n");
    let model = dir.path().join("m.epca");
    let o = entpca(&["fit", "--input", s(&csv), "--k", "1", "--output-model", s(&model)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(entpca(&["fit", "--nope"]).status.code(), Some(2));
    assert_eq!(entpca(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_model_file_exits_3() {
    let o = entpca(&["dist", "--model", "/nonexistent/m.epca", "--all-pairs"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn dist_same_column() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_diag(dir.path());
    let o = entpca(&["dist", "--model", s(&model), "--pairs", "0,0", "--pairs", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["classic"], 0.0);
    assert_eq!(rows[0]["lower"], 0.0);
    // z_0 = 0, z_1 = 1
    assert_eq!(rows[0]["ent"], 0.0);
    assert_eq!(rows[1]["ent"], 2.0);
}

#[test]
fn dist_all_pairs_count_and_exact_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "d.csv", "1,0,2\n0,1,1\n3,1,0\n");
    let model = dir.path().join("m.epca");
    assert_eq!(entpca(&["fit", "--input", s(&csv), "--k", "1", "--output-model", s(&model)]).status.code(), Some(0));

    let o = entpca(&["dist", "--model", s(&model), "--all-pairs"]);
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(!stdout(&o).contains("exact"));

    let o = entpca(&["dist", "--model", s(&model), "--all-pairs", "--input", s(&csv), "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,classic,lower,ent,exact"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..2], &["0", "1"]);
    // items are rows: a_0 = (1,0,2), a_1 = (0,1,1)
    assert_eq!(first[5].parse::<f64>().unwrap(), 3.0);
}

#[test]
fn dist_rows_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let text = "1.5,0.25,2\n0.5,1,1.75\n3,1.25,0\n-1,2,0.5\n";
    let csv = write(dir.path(), "d.csv", text);
    let model_path = dir.path().join("m.epca");
    entpca(&["fit", "--input", s(&csv), "--k", "2", "--output-model", s(&model_path)]);
    // csv output is parsed with the std float parser, which is exact
    let o = entpca(&["dist", "--model", s(&model_path), "--all-pairs", "--format", "csv"]);

    let rows: Vec<Vec<f64>> =
        text.lines().map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let cols: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let model = fit(&Dataset::new(DenseMatrix::from_columns(&cols).unwrap()).unwrap(), 2, false).unwrap();
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(lines.len(), 6);
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (i, j) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let e = estimate_cols(&model, i, j).unwrap();
        for (cell, want) in f[2..].iter().zip([e.classic, e.lower, e.ent]) {
            assert_eq!(cell.parse::<f64>().unwrap().to_bits(), want.to_bits());
        }
    }
}

#[test]
fn dist_bad_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_diag(dir.path());
    let q = write(dir.path(), "q.csv", "1,2,3\n");
    assert_eq!(entpca(&["dist", "--model", s(&model), "--query-file", s(&q)]).status.code(), Some(2));
    assert_eq!(entpca(&["dist", "--model", s(&model), "--pairs", "0,5"]).status.code(), Some(2));
    assert_eq!(entpca(&["dist", "--model", s(&model)]).status.code(), Some(2));
    let other = write(dir.path(), "o.csv", "1,2,3\n4,5,6\n");
    assert_eq!(entpca(&["dist", "--model", s(&model), "--all-pairs", "--input", s(&other)]).status.code(), Some(2));

    let q = write(dir.path(), "q2.csv", "1,1\n");
    let o = entpca(&["dist", "--model", s(&model), "--query-file", s(&q)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn rq_row_basis_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "d.csv", "1,0,2\n0,1,1\n3,1,0\n2,2,2\n");
    let model = dir.path().join("m.epca");
    entpca(&["fit", "--input", s(&csv), "--k", "1", "--output-model", s(&model)]);
    let vecs = write(dir.path(), "v.csv", "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n");
    let o = entpca(&["rq", "--model", s(&model), "--space", "row", "--vectors-file", s(&vecs), "--input", s(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let norms = [5.0, 2.0, 10.0, 12.0];
    for (line, want) in stdout(&o).lines().zip(norms) {
        let v: Value = serde_json::from_str(line).unwrap();
        let ent = v["ent"].as_f64().unwrap();
        assert!((ent - want).abs() <= 1e-9 * want, "{ent} vs {want}");
        assert_eq!(v["exact"].as_f64().unwrap(), want);
    }
}

#[test]
fn rq_zero_vector_and_missing_seed() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_diag(dir.path());
    let zero = write(dir.path(), "z.csv", "0,0\n");
    assert_eq!(entpca(&["rq", "--model", s(&model), "--space", "column", "--vectors-file", s(&zero)]).status.code(), Some(2));
    assert_eq!(entpca(&["rq", "--model", s(&model), "--space", "column", "--random", "3"]).status.code(), Some(2));
}

#[test]
fn rq_random_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_diag(dir.path());
    let args = ["rq", "--model", s(&model), "--space", "row", "--random", "5", "--seed", "9"];
    let a = entpca(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a).lines().count(), 5);
    assert_eq!(a.stdout, entpca(&args).stdout);
    let other = entpca(&["rq", "--model", s(&model), "--space", "row", "--random", "5", "--seed", "10"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn bench_tiny_config_report_shape_and_determinism() {
    let cfg = repo_root().join("configs/tiny.json");
    let a = entpca(&["bench", "--config", s(&cfg)]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let b = entpca(&["--threads", "3", "bench", "--config", s(&cfg)]);
    assert_eq!(a.stdout, b.stdout);

    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["versions"]["format"], 1);
    assert_eq!(v["config"]["seed"], 42);
    let results = v["results"].as_array().unwrap();
    // per k: 3 pair + 3 query + 2 + 2 rq
    assert_eq!(results.len(), 3 * 10);
    for r in results {
        assert!(r["count"].as_u64().unwrap() >= 1);
        assert!(r["mean_abs_err"].as_f64().unwrap() >= 0.0);
        assert!(r["std_abs_err"].as_f64().unwrap() >= 0.0);
        assert!(["classic", "lower", "ent"].contains(&r["formula"].as_str().unwrap()));
        assert!(["pairs", "queries", "rq-column", "rq-row"].contains(&r["population"].as_str().unwrap()));
    }
    let kmatch = v["kmatch"].as_array().unwrap();
    assert_eq!(kmatch.len(), 2);
    for km in kmatch {
        assert_eq!(km["target_formula"], "ent");
        assert_eq!(km["curve"].as_array().unwrap().len(), 5);
        for m in km["matched"].as_array().unwrap() {
            assert!(m["k"].is_u64() || m["k"] == "not reached at k = m-1");
        }
    }
    assert!(v["metadata"]["std_convention"].as_str().unwrap().contains("population"));
}

#[test]
fn bench_threads_env_and_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_root().join("configs/tiny.json");
    let out = dir.path().join("r.json");
    let table = dir.path().join("t.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_entpca"))
        .args(["bench", "--config", s(&cfg), "--output", s(&out), "--table-csv", s(&table)])
        .env("ENTPCA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read(&out).unwrap(), entpca(&["bench", "--config", s(&cfg)]).stdout);
    let t = fs::read_to_string(&table).unwrap();
    assert!(t.starts_with("k,formula,pairs_mean,pairs_std,queries_mean"));
    assert_eq!(t.lines().count(), 1 + 3 * 3);
}

#[test]
fn bench_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = repo_root().join("data/tiny.csv");
    let big = write(dir.path(), "big.json", &format!(r#"{{"dataset": "{}", "k": [1], "seed": 1, "subsample": 500}}"#, s(&data)));
    assert_eq!(entpca(&["bench", "--config", s(&big)]).status.code(), Some(2));
    let default_sub = write(dir.path(), "def.json", &format!(r#"{{"dataset": "{}", "k": [1], "seed": 1}}"#, s(&data)));
    assert_eq!(entpca(&["bench", "--config", s(&default_sub)]).status.code(), Some(2));
    let no_seed = write(dir.path(), "ns.json", &format!(r#"{{"dataset": "{}", "k": [1]}}"#, s(&data)));
    assert_eq!(entpca(&["bench", "--config", s(&no_seed)]).status.code(), Some(3));
    let bad_k = write(dir.path(), "bk.json", &format!(r#"{{"dataset": "{}", "k": [6], "seed": 1, "subsample": null}}"#, s(&data)));
    assert_eq!(entpca(&["bench", "--config", s(&bad_k)]).status.code(), Some(2));
    assert_eq!(entpca(&["bench", "--config", "/nonexistent.json"]).status.code(), Some(3));
    assert_eq!(entpca(&["--threads", "0", "bench", "--config", s(&bad_k)]).status.code(), Some(2));
}

#[test]
fn kmatch_outputs() {
    let cfg = repo_root().join("configs/tiny.json");
    let o = entpca(&["kmatch", "--config", s(&cfg), "--target-k", "2", "--population", "queries"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["target_k"], 2);
    assert_eq!(v["population"], "queries");

    let o = entpca(&["kmatch", "--config", s(&cfg), "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("k,classic,lower,ent"));
    assert_eq!(text.lines().count(), 1 + 5);

    assert_eq!(entpca(&["kmatch", "--config", s(&cfg), "--target-k", "5"]).status.code(), Some(2));
}
