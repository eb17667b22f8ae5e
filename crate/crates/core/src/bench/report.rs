// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Machine-readable benchmark reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::index::Relationship;

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Metrics for one engine on one workload.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub engine: String,
    /// `query`, `insert`, `delete` or `hybrid`.
    pub workload: String,
    pub relationship: Option<Relationship>,
    pub selectivity: Option<f64>,
    /// Measured Intersects selectivity, averaged over the windows.
    pub achieved_selectivity: Option<f64>,
    /// Query fraction of a hybrid workload.
    pub read_fraction: Option<f64>,
    pub windows: usize,
    pub operations: usize,
    pub mismatches: usize,
    pub build_time_ns: u64,
    pub probe_time_ns: u64,
    pub refine_time_ns: u64,
    pub total_time_ns: u64,
    /// Records handed to the exact predicate, summed over windows.
    pub candidates_checked: u64,
    /// Same, with leaf-MBR skipping disabled (GLIN engines only).
    pub candidates_without_skip: Option<u64>,
    pub result_count: u64,
    pub metadata_bytes: usize,
    pub node_count: usize,
    pub leaf_count: Option<usize>,
    pub throughput_ops_per_sec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub command: String,
    pub records: usize,
    pub seed: Option<u64>,
    pub runs: Vec<RunMetrics>,
}

impl MetricsReport {
    pub fn new(command: &str, records: usize, seed: Option<u64>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            records,
            seed,
            runs: Vec::new(),
        }
    }

    pub fn total_mismatches(&self) -> usize {
        self.runs.iter().map(|r| r.mismatches).sum()
    }

    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    /// One row per run; the schema version is the first column.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            schema_version: u32,
            command: &'a str,
            records: usize,
            engine: &'a str,
            workload: &'a str,
            relationship: Option<Relationship>,
            selectivity: Option<f64>,
            achieved_selectivity: Option<f64>,
            read_fraction: Option<f64>,
            windows: usize,
            operations: usize,
            mismatches: usize,
            build_time_ns: u64,
            probe_time_ns: u64,
            refine_time_ns: u64,
            total_time_ns: u64,
            candidates_checked: u64,
            candidates_without_skip: Option<u64>,
            result_count: u64,
            metadata_bytes: usize,
            node_count: usize,
            leaf_count: Option<usize>,
            throughput_ops_per_sec: f64,
        }
        let mut out = csv::Writer::from_writer(w);
        for r in &self.runs {
            out.serialize(Row {
                schema_version: self.schema_version,
                command: &self.command,
                records: self.records,
                engine: &r.engine,
                workload: &r.workload,
                relationship: r.relationship,
                selectivity: r.selectivity,
                achieved_selectivity: r.achieved_selectivity,
                read_fraction: r.read_fraction,
                windows: r.windows,
                operations: r.operations,
                mismatches: r.mismatches,
                build_time_ns: r.build_time_ns,
                probe_time_ns: r.probe_time_ns,
                refine_time_ns: r.refine_time_ns,
                total_time_ns: r.total_time_ns,
                candidates_checked: r.candidates_checked,
                candidates_without_skip: r.candidates_without_skip,
                result_count: r.result_count,
                metadata_bytes: r.metadata_bytes,
                node_count: r.node_count,
                leaf_count: r.leaf_count,
                throughput_ops_per_sec: r.throughput_ops_per_sec,
            })?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MetricsReport {
        let mut r = MetricsReport::new("bench", 10, Some(1));
        r.runs.push(RunMetrics {
            engine: "scan".into(),
            workload: "query".into(),
            relationship: Some(Relationship::Contains),
            selectivity: Some(0.01),
            ..Default::default()
        });
        r
    }

    #[test]
    fn json_carries_schema_version() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["runs"][0]["relationship"], "contains");
        let back: MetricsReport = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn csv_has_header_and_row() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines
            .next()
            .unwrap()
            .starts_with("schema_version,command,records,engine"));
        assert!(lines.next().unwrap().starts_with("1,bench,10,scan,query,contains,0.01"));
    }
}
