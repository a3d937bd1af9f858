use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

fn rareperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rareperm")).args(args).output().expect("binary runs")
}

fn matrix(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn records(out: &[u8]) -> Vec<Value> {
    String::from_utf8_lossy(out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{e}: {l}")))
        .collect()
}

fn without_timing(mut v: Vec<Value>) -> Vec<Value> {
    for r in &mut v {
        r.as_object_mut().unwrap().remove("elapsed_seconds");
    }
    v
}

#[test]
fn exact_small_instance() {
    let f = matrix("3\t1\t2\t0\n");
    let out = rareperm(&["--method", "exact", "--input", f.path().to_str().unwrap(), "--group-sizes", "2,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &records(&out.stdout)[0];
    assert!((r["p_hat"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!((r["exceed"].as_u64(), r["total"].as_u64()), (Some(2), Some(6)));
    assert_eq!(r["method"], "exact");
    assert_eq!(r["feature_id"], "row1");
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"p_hat\":3.3333333333333331e-1"));
}

#[test]
fn crude_runs_are_reproducible() {
    let args = ["--method", "crude", "--simulate", "8,1,1,8,0,1", "--n-perms", "10000", "--seed", "12"];
    let a = rareperm(&args);
    let b = rareperm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timing(records(&a.stdout)), without_timing(records(&b.stdout)));
    let r = &records(&a.stdout)[0];
    assert_eq!(r["samples_estimate"], 10000);
    assert_eq!(r["seed"], 12);
}

#[test]
fn replicate_summary_on_simulated_data() {
    let out = rareperm(&[
        "--method", "aisp", "--simulate", "20,1,1,20,0,1", "--data-seed", "3", "--seed", "8",
        "--replicates", "100", "--n-update", "500", "--m-estimate", "2000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out.stdout);
    assert_eq!(recs.len(), 101);
    let summary = recs.last().unwrap();
    assert_eq!(summary["record"], "summary");
    assert_eq!(summary["method"], "aisp2");
    assert_eq!(summary["replicates"], 100);
    assert_eq!(summary["reference_source"], "mean");
    for key in ["mean_p_hat", "sd_p_hat", "mcre", "mse", "are"] {
        assert!(summary[key].as_f64().is_some(), "{key}");
    }
    let p: Vec<f64> = recs[..100].iter().map(|r| r["p_hat"].as_f64().unwrap()).collect();
    let mean = p.iter().sum::<f64>() / 100.0;
    assert!((summary["mean_p_hat"].as_f64().unwrap() - mean).abs() <= 1e-12 * mean);
    // Replicates ran with distinct seeds.
    assert_ne!(recs[0]["run_seed"], recs[1]["run_seed"]);
}

#[test]
fn exact_reference_feeds_summary() {
    let f = matrix("id\ta\tb\tc\td\te\tf\ng1\t2.5\t1.9\t2.2\t0.3\t-0.1\t0.4\n");
    let out = rareperm(&[
        "--method", "crude", "--input", f.path().to_str().unwrap(), "--group-sizes", "3,3", "--seed", "1",
        "--n-perms", "2000", "--replicates", "5",
    ]);
    let recs = records(&out.stdout);
    let summary = recs.last().unwrap();
    assert_eq!(summary["reference_source"], "exact");
    assert!((summary["reference_p"].as_f64().unwrap() - 0.05).abs() < 1e-15);
    assert_eq!(summary["feature_id"], "g1");
}

#[test]
fn tsv_and_json_carry_the_same_numbers() {
    let f = matrix("a\t1.5\t0.2\t2.0\t-0.3\t0.0\nb\t0.1\t0.9\t-0.4\t0.6\t0.8\n");
    let path = f.path().to_str().unwrap();
    let common = ["--method", "aisp", "--input", path, "--group-sizes", "2,3", "--seed", "5", "--n-update", "300", "--m-estimate", "1000"];
    let json = rareperm(&common);
    let tsv = rareperm(&[&common[..], &["--output", "tsv"]].concat());
    assert_eq!(json.status.code(), Some(0));
    let recs = records(&json.stdout);
    let text = String::from_utf8(tsv.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    for (line, rec) in lines.zip(&recs) {
        let cells: Vec<&str> = line.split('\t').collect();
        for (name, cell) in header.iter().zip(&cells).filter(|(n, _)| **n != "elapsed_seconds") {
            match &rec[*name] {
                Value::Number(n) if n.is_f64() => assert_eq!(cell.parse::<f64>().unwrap().to_bits(), n.as_f64().unwrap().to_bits(), "{name}"),
                Value::Number(n) => assert_eq!(cell.parse::<u64>().unwrap(), n.as_u64().unwrap(), "{name}"),
                Value::String(s) => assert_eq!(cell, s, "{name}"),
                Value::Array(trace) => {
                    let parsed: Vec<f64> = cell.split(',').map(|c| c.parse().unwrap()).collect();
                    let want: Vec<f64> = trace.iter().map(|v| v.as_f64().unwrap()).collect();
                    assert_eq!(parsed, want);
                }
                other => panic!("{name}: {other:?}"),
            }
        }
    }
}

#[test]
fn malformed_cells_are_located() {
    let f = matrix("1\t2\t3\t4\n5\tNaN\t7\t8\n");
    let out = rareperm(&["--method", "exact", "--input", f.path().to_str().unwrap(), "--group-sizes", "2,2"]);
    assert_eq!(out.status.code(), Some(4));
    let err = &records(&out.stderr)[0];
    assert_eq!(err["kind"], "parse");
    assert_eq!((err["row"].as_u64(), err["column"].as_u64()), (Some(2), Some(2)));
    assert!(out.stdout.is_empty());
}

#[test]
fn header_ids_are_reported() {
    let f = matrix("id\ts1\ts2\ts3\ts4\ngeneA\t3\t1\t2\t0\ngeneB\t0\t1\t2\t3\n");
    let out = rareperm(&["--method", "exact", "--input", f.path().to_str().unwrap(), "--group-sizes", "2,2"]);
    let ids: Vec<String> = records(&out.stdout).iter().map(|r| r["feature_id"].as_str().unwrap().to_owned()).collect();
    assert_eq!(ids, ["geneA", "geneB"]);
}

#[test]
fn batch_order_ignores_worker_count() {
    let rows: String = (0..6)
        .map(|i| {
            let v: Vec<String> = (0..8).map(|j| format!("{:.3}", ((i * 8 + j) as f64 * 0.77).sin() + if j < 4 { 0.8 } else { 0.0 })).collect();
            format!("f{i}\t{}\n", v.join("\t"))
        })
        .collect();
    let f = matrix(&rows);
    let path = f.path().to_str().unwrap();
    let run = |threads: &str| {
        let out = rareperm(&[
            "--method", "aisp", "--input", path, "--group-sizes", "4,4", "--seed", "3", "--replicates", "2",
            "--n-update", "300", "--m-estimate", "1000", "--threads", threads,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        without_timing(records(&out.stdout))
    };
    let one = run("1");
    assert_eq!(one.len(), 6 * 2 + 6);
    let order: Vec<(String, u64)> = one[..12]
        .iter()
        .map(|r| (r["feature_id"].as_str().unwrap().to_owned(), r["replicate"].as_u64().unwrap()))
        .collect();
    let want: Vec<(String, u64)> = (0..6).flat_map(|i| (0..2).map(move |r| (format!("f{i}"), r))).collect();
    assert_eq!(order, want);
    assert_eq!(one, run("3"));
}

#[test]
fn recorded_seed_reproduces_a_replicate() {
    let base = ["--method", "aisp", "--simulate", "10,1.5,1,10,0,1", "--n-update", "400", "--m-estimate", "2000"];
    let out = rareperm(&[&base[..], &["--seed", "21", "--replicates", "3"]].concat());
    let third = records(&out.stdout)[2].clone();
    let seed = third["run_seed"].as_u64().unwrap().to_string();
    let again = rareperm(&[&base[..], &["--seed", &seed]].concat());
    let rerun = &records(&again.stdout)[0];
    assert_eq!(rerun["p_hat"], third["p_hat"]);
    assert_eq!(rerun["data_digest"], third["data_digest"]);
}

#[test]
fn unreached_threshold_is_an_outlier() {
    // One feature whose observed labelling is the unique extreme of 2^20
    // patterns, with a single short adaptive iteration allowed.
    let row: Vec<String> = (1..=20).map(|v| v.to_string()).collect();
    let f = matrix(&format!("{}\n", row.join("\t")));
    let out = rareperm(&[
        "--method", "aisp", "--input", f.path().to_str().unwrap(), "--group-sizes", "20,0", "--seed", "2",
        "--n-update", "200", "--max-iters", "1", "--replicates", "3", "--reference-p", "9.5367431640625e-7",
    ]);
    assert_eq!(out.status.code(), Some(6));
    let errors = records(&out.stderr);
    assert_eq!(errors.len(), 3);
    assert!(errors.iter().all(|e| e["kind"] == "threshold-not-reached" && e["gamma_trace"].as_array().unwrap().len() == 1));
    let summary = records(&out.stdout).pop().unwrap();
    assert_eq!(summary["outliers"], 3);
    assert_eq!(summary["reference_source"], "user");
    assert_eq!(summary["method"], "aisp1");
    assert!(summary.get("mean_p_hat").is_none());
    assert_eq!(summary["all_runs"]["runs"], 3);
}

#[test]
fn missing_file_and_bad_flags() {
    let out = rareperm(&["--method", "exact", "--input", "/nonexistent/x.tsv", "--group-sizes", "2,2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(records(&out.stderr)[0]["kind"], "io");
    let out = rareperm(&["--method", "aisp", "--simulate", "5,1,1,5,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(records(&out.stderr)[0]["kind"], "usage");
    let out = rareperm(&["--method", "exact", "--simulate", "30,1,1,30,0,1"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(records(&out.stderr)[0]["kind"], "instance-too-large");
}
