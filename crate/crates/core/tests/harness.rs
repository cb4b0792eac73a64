mod common;

use std::process::Command;

use cyclecert::harness::{
    read_csv, run, write_csv, write_json, Experiment, ExperimentConfig, ResultRecord, OUTPUT_SCHEMA,
};
use cyclecert::poisson_lab::dyadic;
use serde_json::Value;

fn config(e: Experiment, n: &[usize], r: usize, trials: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(e);
    c.n = n.to_vec();
    c.r = r;
    c.trials = trials;
    c.seed = 2024;
    c
}

fn csv_without_timing(records: &[ResultRecord]) -> String {
    let mut rows = records.to_vec();
    for r in &mut rows {
        r.elapsed_ms = 0;
    }
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn single_row_round_trips() {
    let rows = run(&config(Experiment::SimulateQ, &[9], 1, 5000)).unwrap();
    assert_eq!(rows.len(), 1);
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn json_output_matches_schema() {
    let schema: Value = serde_json::from_str(OUTPUT_SCHEMA).unwrap();
    let mut galois = config(Experiment::Galois, &[], 8, 0);
    galois.poly = Some("x^16 - x - 1".into());
    let mut fourfold = config(Experiment::Fourfold, &[300], 4, 500);
    fourfold.cutoffs = vec![8, 16];
    for c in [
        config(Experiment::SimulateQ, &[6, 7], 3, 1000),
        config(Experiment::ExactQ, &[5], 2, 0),
        config(Experiment::TvDist, &[6], 2, 0),
        fourfold,
        galois,
    ] {
        let rows = run(&c).unwrap();
        let mut buf = Vec::new();
        write_json(&c, &rows, &mut buf).unwrap();
        let doc: Value = serde_json::from_slice(&buf).unwrap();
        common::validate_schema(&schema, &doc, "$").unwrap();
    }
    let bad: Value = serde_json::json!({"config": {}, "records": []});
    assert!(common::validate_schema(&schema, &bad, "$").is_err());
}

#[test]
fn dyadic_sweep_is_long_format() {
    let ns = dyadic(4, 14);
    let rows = run(&config(Experiment::SimulateQ, &ns, 6, 1000)).unwrap();
    assert_eq!(rows.len(), 11 * 6);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.n, Some(ns[i / 6]));
        assert_eq!(row.r, Some(i % 6 + 1));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let mut tails = config(Experiment::Tails, &[200], 1, 3000);
    tails.eps = 1.0;
    let mut galois = config(Experiment::Galois, &[], 16, 0);
    galois.poly = Some("x^13 - x - 1".into());
    let configs = [
        config(Experiment::SimulateQ, &[10, 100], 4, 3000),
        config(Experiment::ExactQ, &[6], 3, 0),
        config(Experiment::PoissonP, &[128, 256], 1, 3000),
        config(Experiment::EtaFit, &[64, 128, 256], 1, 2000),
        tails,
        config(Experiment::GfCheck, &[30], 1, 0),
        config(Experiment::TvDist, &[8], 2, 0),
        config(Experiment::Fourfold, &[500], 4, 2000),
        galois,
    ];
    for mut c in configs {
        c.threads = 1;
        let one = csv_without_timing(&run(&c).unwrap());
        c.threads = 8;
        let eight = csv_without_timing(&run(&c).unwrap());
        assert_eq!(one, eight, "{:?}", c.experiment);
    }
}

#[test]
fn rows_echo_configuration() {
    let mut c = config(Experiment::Tails, &[300], 1, 500);
    c.eps = 0.5;
    c.x = 2.0;
    let rows = run(&c).unwrap();
    for r in &rows {
        assert_eq!(r.param("eps"), Some("0.5"));
        assert_eq!(r.param("x"), Some("2"));
        assert_eq!(r.seed, cyclecert::poisson_lab::seed_for_n(2024, 300));
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclecert"))
}

#[test]
fn cli_exit_codes() {
    let ok = cli()
        .args(["exact-q", "--n", "4", "--r", "2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);

    let invalid = cli().args(["exact-q", "--n", "40"]).output().unwrap();
    assert_eq!(invalid.status.code(), Some(2));
    let bad_flag = cli().args(["simulate-q", "--n", "ten"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_poly = cli()
        .args(["galois", "--poly", "x^2 + 0.5"])
        .output()
        .unwrap();
    assert_eq!(bad_poly.status.code(), Some(2));

    // the rate exponent at small n is far from its limit
    let failed = cli()
        .args([
            "tails", "--n", "100", "--trials", "2000", "--eps", "1", "--x", "1.5", "--assert",
        ])
        .output()
        .unwrap();
    assert_eq!(failed.status.code(), Some(3));

    let gf = cli().args(["gf-check", "--n", "60"]).output().unwrap();
    assert_eq!(gf.status.code(), Some(0));
    assert!(String::from_utf8(gf.stderr)
        .unwrap()
        .contains("all coefficients = 1: PASS"));
}

#[test]
fn cli_writes_files_and_reads_thread_env() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("q.csv");
    let json_path = dir.path().join("q.json");
    let status = cli()
        .env("CYCLECERT_THREADS", "1")
        .args([
            "simulate-q",
            "--n",
            "12",
            "--r",
            "3",
            "--trials",
            "2000",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&csv_path)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_csv(std::fs::File::open(&csv_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);

    let status = cli()
        .args([
            "simulate-q",
            "--n",
            "12",
            "--r",
            "3",
            "--trials",
            "2000",
            "--seed",
            "3",
            "--threads",
            "4",
        ])
        .args(["--format", "json", "--out"])
        .arg(&json_path)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: Value = serde_json::from_reader(std::fs::File::open(&json_path).unwrap()).unwrap();
    assert_eq!(doc["config"]["format"], "json");
    assert_eq!(doc["config"]["threads"], 4);
    let json_rows: Vec<ResultRecord> = serde_json::from_value(doc["records"].clone()).unwrap();
    let strip = |v: &[ResultRecord]| {
        v.iter()
            .map(|r| ResultRecord {
                elapsed_ms: 0,
                ..r.clone()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&json_rows), strip(&rows));

    let unwritable = cli()
        .args(["exact-q", "--n", "3", "--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(unwritable.status.code(), Some(1));
}
