// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Insert, delete and hybrid workloads.
//!
//! * insert: bulk-load a random half, insert the other half.
//! * delete: bulk-load everything, delete a random half.
//! * hybrid: bulk-load a random half, then run transactions that are
//!   either a 1%-selectivity Intersects query or a batch insert of 1% of
//!   the dataset; every query is checked against a scan.
//!
//! Each run ends by comparing the index contents with the expected survivor
//! set and auditing the structure.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::queries::{knn_size, knn_window};
use super::report::{MetricsReport, RunMetrics};
use super::runner::BenchConfig;
use crate::error::{GlinError, Result};
use crate::geometry::Geometry;
use crate::index::{GeomId, GlinIndex, Relationship};
use crate::oracle::{multiset_diff, FlatStore};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaintenanceMode {
    Insert,
    Delete,
    /// `read_fraction` of the transactions are queries.
    Hybrid {
        read_fraction: f64,
    },
}

impl fmt::Display for MaintenanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaintenanceMode::Insert => f.write_str("insert"),
            MaintenanceMode::Delete => f.write_str("delete"),
            MaintenanceMode::Hybrid { .. } => f.write_str("hybrid"),
        }
    }
}

impl FromStr for MaintenanceMode {
    type Err = GlinError;

    /// `insert`, `delete` or `hybrid` (90% reads); `hybrid:<fraction>` sets
    /// the read fraction.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "insert" => Ok(MaintenanceMode::Insert),
            "delete" => Ok(MaintenanceMode::Delete),
            "hybrid" => Ok(MaintenanceMode::Hybrid { read_fraction: 0.9 }),
            other => {
                let frac = other
                    .strip_prefix("hybrid:")
                    .and_then(|f| f.parse::<f64>().ok())
                    .filter(|f| (0.0..=1.0).contains(f))
                    .ok_or_else(|| GlinError::InvalidParam(format!("unknown maintenance mode `{other}`")))?;
                Ok(MaintenanceMode::Hybrid { read_fraction: frac })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaintenanceConfig {
    pub bench: BenchConfig,
    pub seed: u64,
    /// Hybrid transaction count.
    pub transactions: usize,
    /// Hybrid query selectivity.
    pub query_selectivity: f64,
    /// Hybrid insert batch, as a fraction of the dataset.
    pub batch_fraction: f64,
}

impl Default for MaintenanceConfig {
    fn default() -> Self {
        Self {
            bench: BenchConfig::default(),
            seed: 42,
            transactions: 100,
            query_selectivity: 0.01,
            batch_fraction: 0.01,
        }
    }
}

/// Sorted ids currently in the index.
fn index_ids(idx: &GlinIndex) -> Vec<GeomId> {
    let mut ids: Vec<GeomId> = idx.iter().map(|r| r.id).collect();
    ids.sort_unstable();
    ids
}

fn check_survivors(idx: &GlinIndex, expected: &[GeomId], label: &str) -> Result<()> {
    let (missing, unexpected) = multiset_diff(expected, &index_ids(idx));
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(GlinError::ResultMismatch {
            engine: "glin-piecewise".into(),
            window: format!("{label}: survivor set"),
            missing,
            unexpected,
        });
    }
    idx.audit()
}

fn split_half(n: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let rest = order.split_off(n / 2);
    (order, rest)
}

pub fn bench_maintenance(
    records: &[(Geometry, GeomId)],
    mode: MaintenanceMode,
    cfg: &MaintenanceConfig,
) -> Result<MetricsReport> {
    if records.len() < 2 {
        return Err(GlinError::InvalidParam(
            "maintenance workloads need at least 2 records".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let b = &cfg.bench;
    let mut report = MetricsReport::new("bench-maintenance", records.len(), Some(cfg.seed));
    let mut run = RunMetrics {
        engine: "glin-piecewise".into(),
        workload: mode.to_string(),
        ..Default::default()
    };

    let load = |subset: &[usize]| {
        let t0 = Instant::now();
        let idx = GlinIndex::bulk_load_with_piecewise(
            subset.iter().map(|&i| records[i].clone()),
            b.curve,
            b.params,
            b.piece_limitation,
        );
        idx.map(|i| (i, t0.elapsed()))
    };

    let (idx, elapsed) = match mode {
        MaintenanceMode::Insert => {
            let (loaded, pending) = split_half(records.len(), &mut rng);
            let (mut idx, build) = load(&loaded)?;
            run.build_time_ns = build.as_nanos() as u64;
            let t0 = Instant::now();
            for &i in &pending {
                let (g, id) = &records[i];
                idx.insert(g.clone(), *id)?;
            }
            let elapsed = t0.elapsed();
            run.operations = pending.len();
            let mut all: Vec<GeomId> = records.iter().map(|r| r.1).collect();
            all.sort_unstable();
            check_survivors(&idx, &all, "insert")?;
            (idx, elapsed)
        }
        MaintenanceMode::Delete => {
            let everything: Vec<usize> = (0..records.len()).collect();
            let (mut idx, build) = load(&everything)?;
            run.build_time_ns = build.as_nanos() as u64;
            let (_, doomed) = split_half(records.len(), &mut rng);
            let t0 = Instant::now();
            let mut removed = 0;
            for &i in &doomed {
                removed += idx.delete(&records[i].0)?;
            }
            let elapsed = t0.elapsed();
            run.operations = doomed.len();
            // delete removes every copy of a geometry
            let gone: std::collections::HashSet<String> = doomed.iter().map(|&i| records[i].0.to_wkt()).collect();
            let mut survivors: Vec<GeomId> = records
                .iter()
                .filter(|(g, _)| !gone.contains(&g.to_wkt()))
                .map(|r| r.1)
                .collect();
            survivors.sort_unstable();
            if removed != records.len() - survivors.len() {
                return Err(GlinError::Audit(format!(
                    "deleted {removed} records, expected {}",
                    records.len() - survivors.len()
                )));
            }
            check_survivors(&idx, &survivors, "delete")?;
            (idx, elapsed)
        }
        MaintenanceMode::Hybrid { read_fraction } => {
            run.read_fraction = Some(read_fraction);
            let (loaded, mut pending) = split_half(records.len(), &mut rng);
            let (mut idx, build) = load(&loaded)?;
            run.build_time_ns = build.as_nanos() as u64;
            let mut oracle = FlatStore::from_records(loaded.iter().map(|&i| records[i].clone()))?;
            let mut live: Vec<(Geometry, GeomId)> = loaded.iter().map(|&i| records[i].clone()).collect();
            let batch = ((cfg.batch_fraction * records.len() as f64).round() as usize).max(1);
            let mut busy = Duration::ZERO;
            let mut first_failure = None;
            let mut queries = 0;
            for _ in 0..cfg.transactions {
                let is_query = pending.is_empty() || rng.random::<f64>() < read_fraction;
                if is_query {
                    let k = knn_size(cfg.query_selectivity, live.len()).unwrap_or(1);
                    let centers: Vec<(f64, f64)> = live
                        .iter()
                        .map(|(g, _)| {
                            let c = g.mbr().center();
                            (c.lon, c.lat)
                        })
                        .collect();
                    let seed = rng.random_range(0..live.len());
                    let window = knn_window(&live, &centers, seed, k).to_polygon();
                    let t0 = Instant::now();
                    let got = idx.range_query(&window, Relationship::Intersects)?;
                    busy += t0.elapsed();
                    queries += 1;
                    let want = oracle.query(&window, Relationship::Intersects);
                    let (missing, unexpected) = multiset_diff(&want, &got);
                    run.result_count += got.len() as u64;
                    if !missing.is_empty() || !unexpected.is_empty() {
                        run.mismatches += 1;
                        first_failure.get_or_insert((window.to_wkt(), missing, unexpected));
                    }
                } else {
                    let take = batch.min(pending.len());
                    let chunk: Vec<usize> = pending.drain(..take).collect();
                    let t0 = Instant::now();
                    for &i in &chunk {
                        let (g, id) = &records[i];
                        idx.insert(g.clone(), *id)?;
                    }
                    busy += t0.elapsed();
                    for &i in &chunk {
                        oracle.insert(records[i].0.clone(), records[i].1)?;
                        live.push(records[i].clone());
                    }
                }
            }
            run.operations = cfg.transactions;
            run.windows = queries;
            if let Some((window, missing, unexpected)) = first_failure {
                return Err(GlinError::ResultMismatch {
                    engine: "glin-piecewise".into(),
                    window,
                    missing,
                    unexpected,
                });
            }
            let mut expected: Vec<GeomId> = live.iter().map(|r| r.1).collect();
            expected.sort_unstable();
            check_survivors(&idx, &expected, "hybrid")?;
            (idx, busy)
        }
    };

    let stats = idx.stats();
    run.total_time_ns = elapsed.as_nanos() as u64;
    run.throughput_ops_per_sec = run.operations as f64 / elapsed.as_secs_f64().max(1e-12);
    run.metadata_bytes = stats.metadata_bytes + idx.piecewise().map_or(0, |p| p.size_bytes());
    run.node_count = stats.node_count;
    run.leaf_count = Some(stats.leaf_count);
    report.runs.push(run);
    Ok(report)
}
