// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Benchmark harness: synthetic data, query windows, timed runs checked
//! against the scan oracle, and maintenance workloads.

pub mod datagen;
pub mod dataset;
pub mod maintenance;
pub mod queries;
pub mod report;
pub mod runner;

pub use datagen::{generate, Distribution, GenParams};
pub use dataset::{read_dataset, read_queries, read_wkt_lines, write_dataset, write_queries, QueryWindow};
pub use maintenance::{bench_maintenance, MaintenanceConfig, MaintenanceMode};
pub use queries::{achieved_selectivity, make_queries};
pub use report::{MetricsReport, RunMetrics, SCHEMA_VERSION};
pub use runner::{bench, parse_engines, verify, BenchConfig, BuiltEngine, Engine};

/// Default selectivities: 1%, 0.1%, 0.01% and 0.001%.
pub const DEFAULT_SELECTIVITIES: [f64; 4] = [0.01, 0.001, 0.0001, 0.00001];
