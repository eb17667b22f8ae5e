// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn glin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = glin(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (file, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        ok(&[
            "generate",
            "--distribution",
            "diagonal",
            "-n",
            "500",
            "--seed",
            seed,
            "-o",
            p(file),
        ]);
    }
    let read = |f: &Path| std::fs::read(f).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(String::from_utf8(read(&a)).unwrap().lines().count(), 500);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    assert_eq!(glin(&["generate", "-n", "0", "-o", p(&out)]).status.code(), Some(2));

    let wkt = dir.path().join("bad.wkt");
    std::fs::write(&wkt, "POINT (1 2)\nPOLYGON ((0 0, 1 0, 1 1))\n").unwrap();
    let res = glin(&["ingest", "-i", p(&wkt), "-o", p(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 2"));

    let res = glin(&["--cell-size", "-1", "stats", "-d", p(&out)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn full_workflow_on_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/mixed_10k.wkt");
    let data = dir.path().join("data.tsv");
    let queries = dir.path().join("queries.tsv");
    ok(&["ingest", "-i", fixture, "-o", p(&data)]);
    ok(&[
        "make-queries",
        "-d",
        p(&data),
        "--selectivity",
        "0.01",
        "--selectivity",
        "0.001",
        "--count",
        "10",
        "-o",
        p(&queries),
    ]);
    assert_eq!(std::fs::read_to_string(&queries).unwrap().lines().count(), 20);

    let index_flags = [
        "--fanout",
        "16",
        "--max-leaf-records",
        "256",
        "--piece-limitation",
        "100",
    ];
    let mut args: Vec<&str> = index_flags.to_vec();
    args.extend([
        "bench",
        "-d",
        p(&data),
        "-q",
        p(&queries),
        "--relationship",
        "intersects",
        "--repetitions",
        "1",
    ]);
    let report: Value = serde_json::from_str(&ok(&args)).unwrap();
    assert_eq!(report["schema_version"], 1);
    let engines: Vec<&str> = report["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["engine"].as_str().unwrap())
        .collect();
    assert!(engines.contains(&"glin-piecewise") && engines.contains(&"rtree"));
    for run in report["runs"].as_array().unwrap() {
        assert_eq!(run["mismatches"], 0);
    }

    let verify = ok(&[
        "verify",
        "-d",
        p(&data),
        "-q",
        p(&queries),
        "--engines",
        "glin,rtree,scan",
        "--output",
        "csv",
    ]);
    let mut rows = csv::Reader::from_reader(verify.as_bytes());
    assert_eq!(&rows.headers().unwrap()[0], "schema_version");
    assert!(rows.records().count() >= 3);

    let stats: Value = serde_json::from_str(&ok(&["stats", "-d", p(&data)])).unwrap();
    assert_eq!(stats["records"], 10_000);
    assert!(stats["glin"]["metadata_bytes"].as_u64().unwrap() < stats["rtree"]["metadata_bytes"].as_u64().unwrap());

    let maint: Value = serde_json::from_str(&ok(&[
        "bench-maintenance",
        "-d",
        p(&data),
        "--mode",
        "hybrid:0.5",
        "--transactions",
        "20",
    ]))
    .unwrap();
    assert_eq!(maint["runs"][0]["operations"], 20);
}

#[test]
fn plain_index_rejects_intersects() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    let queries = dir.path().join("q");
    ok(&["generate", "-n", "300", "-o", p(&data)]);
    ok(&[
        "make-queries",
        "-d",
        p(&data),
        "--selectivity",
        "0.01",
        "--count",
        "3",
        "-o",
        p(&queries),
    ]);
    let res = glin(&[
        "verify",
        "-d",
        p(&data),
        "-q",
        p(&queries),
        "--engines",
        "glin",
        "--relationship",
        "intersects",
    ]);
    assert_eq!(res.status.code(), Some(2));
}
