use serde_json::Value;
use std::process::{Command, Output};

fn backyard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backyard"))
        .args(args)
        .env_remove("BACKYARD_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn fuzz_report_has_one_row_per_seed_and_trial() {
    let out = backyard(&[
        "--cmd", "ops-fuzz", "--n", "1024", "--ops", "5000", "--seeds", "3,4", "--trials", "2",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "ops-fuzz");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r["mismatches"], 0);
        assert_eq!(r["budget_violations"], 0);
        assert_eq!(r["trials"], 2);
        assert!(r.get("tolerance").is_some());
    }
    assert_eq!(rows[0]["seed"], 3);
    assert_eq!(rows[0]["trial_seed"], 3);
    assert_ne!(rows[1]["trial_seed"], 3);
    assert_eq!(v["summary"]["pass"], true);
}

#[test]
fn empty_sequence_passes() {
    let out = backyard(&["--cmd", "ops-fuzz", "--n", "1024", "--ops", "0"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["rows"][0]["final_len"], 0);
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "--cmd",
        "ops-fuzz",
        "--dict",
        "succinct",
        "--u",
        "65536",
        "--n",
        "256",
        "--ops",
        "4000",
        "--mode-bins",
        "ranked",
        "--seeds",
        "7",
    ];
    let a = backyard(&args);
    let b = backyard(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["rows"][0]["target"], "succinct/ranked");
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_backyard"))
        .args(["--cmd", "fpr", "--n", "500", "--ops", "2000"])
        .env("BACKYARD_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["rows"][0]["seed"], 42);
    assert_eq!(v["rows"][0]["false_negatives"], 0);
    assert!(v["summary"]["aggregate"]["mean_fpr"].is_number());
}

#[test]
fn csv_rows_carry_seed_and_tolerance() {
    let out = backyard(&[
        "--cmd",
        "overflow-stats",
        "--n",
        "4096",
        "--seeds",
        "0..3",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for col in [
        "schema",
        "seed",
        "trials",
        "tolerance",
        "overflow",
        "limit",
        "map",
    ] {
        assert!(header.contains(&col), "missing column {col}");
    }
    // two first-level maps per seed
    assert_eq!(lines.count(), 6);
}

#[test]
fn space_audit_rows() {
    let out = backyard(&["--cmd", "space-audit", "--u", "65536"]);
    assert!(out.status.success());
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let info = rows.iter().find(|r| r["kind"] == "info-bound").unwrap();
    assert_eq!(info["info_bound"], 11);
    let bits = rows.iter().find(|r| r["kind"] == "bits").unwrap();
    assert!(bits["bits_hash_descriptors"].as_u64().unwrap() > 0);
    assert_eq!(bits["within"], true);
    assert!(rows
        .iter()
        .filter(|r| r["kind"] == "words")
        .all(|r| r["within"] == true));
}

#[test]
fn bench_rows_match_op_count() {
    let out = backyard(&["--cmd", "bench", "--n", "2048", "--ops", "1000"]);
    assert!(out.status.success());
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let ops: Vec<&str> = rows.iter().map(|r| r["op"].as_str().unwrap()).collect();
    assert_eq!(ops, ["insert", "lookup", "delete"]);
    assert!(rows.iter().all(|r| r["count"] == 1000));
}

#[test]
fn queue_stats_within_limit() {
    let out = backyard(&[
        "--cmd",
        "queue-stats",
        "--n",
        "4096",
        "--L",
        "10",
        "--mode-bins",
        "phf",
        "--ops",
        "20000",
    ]);
    assert!(out.status.success());
    let r = &json(&out)["rows"][0];
    assert_eq!(r["limit"], 48);
    assert_eq!(r["within"], true);
}

#[test]
fn strict_makes_exceedances_fatal() {
    // tiny bins overflow far beyond eps n / 16
    let args = [
        "--cmd",
        "overflow-stats",
        "--n",
        "64",
        "--eps",
        "0.5",
        "--c",
        "0.1",
        "--seeds",
        "0..4",
    ];
    let lax = backyard(&args);
    assert!(lax.status.success());
    assert!(json(&lax)["summary"]["exceedances"].as_u64().unwrap() > 0);
    let mut strict = args.to_vec();
    strict.push("--strict");
    let out = backyard(&strict);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["summary"]["pass"], false);
}

#[test]
fn out_writes_a_file() {
    let path = std::env::temp_dir().join(format!("backyard-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = backyard(&["--cmd", "fpr", "--n", "300", "--ops", "1000", "--out", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "fpr");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn bad_input_is_rejected() {
    assert!(!backyard(&["--cmd", "nope"]).status.success());
    assert_eq!(
        backyard(&["--cmd", "fpr", "--seeds", "x"]).status.code(),
        Some(2)
    );
    let out = backyard(&["--cmd", "ops-fuzz", "--mode-bins", "ranked"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("succinct"));
}

#[test]
fn starved_queue_is_reported() {
    let run = |l: &str| {
        let out = backyard(&[
            "--cmd",
            "queue-stats",
            "--n",
            "4096",
            "--L",
            l,
            "--ops",
            "20000",
        ]);
        assert!(out.status.success());
        json(&out)["rows"][0].clone()
    };
    let starved = run("0");
    assert_eq!(starved["within"], false);
    assert!(starved["structural_failure"].is_string());
    let generous = run("1000");
    assert_eq!(generous["cuckoo_queue_high_water"], 0);
    assert_eq!(generous["within"], true);
}
