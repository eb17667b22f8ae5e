// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Command-line front end for the benchmark harness.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use glin::augment::{PiecewiseFunction, DEFAULT_PIECE_LIMITATION};
use glin::bench::{
    self, BenchConfig, Distribution, Engine, GenParams, MaintenanceConfig, MaintenanceMode, MetricsReport,
};
use glin::geometry::{Geometry, GeometryKind};
use glin::index::{BuildParams, GeomId, GlinIndex, IndexStats, Relationship};
use glin::oracle::{RTreeStats, StrRTree, DEFAULT_RTREE_FANOUT};
use glin::zcurve::{CurveConfig, DEFAULT_CELL_SIZE};
use glin::{GlinError, Result};

#[derive(Parser)]
#[command(
    name = "glin",
    version,
    about = "Learned spatial index: data generation, benchmarks and verification"
)]
struct Cli {
    #[command(flatten)]
    index: IndexArgs,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IndexArgs {
    /// Grid cell size in degrees.
    #[arg(long, default_value_t = DEFAULT_CELL_SIZE, global = true)]
    cell_size: f64,
    /// Records per piece of the piecewise function.
    #[arg(long, default_value_t = DEFAULT_PIECE_LIMITATION, global = true)]
    piece_limitation: usize,
    /// Children per internal node.
    #[arg(long, default_value_t = BuildParams::default().fanout, global = true)]
    fanout: usize,
    /// Largest partition that becomes a leaf at build time.
    #[arg(long, default_value_t = BuildParams::default().max_leaf_records, global = true)]
    max_leaf_records: usize,
}

impl IndexArgs {
    fn bench_config(&self, repetitions: usize) -> Result<BenchConfig> {
        Ok(BenchConfig {
            curve: CurveConfig::new(self.cell_size)?,
            params: BuildParams {
                fanout: self.fanout,
                max_leaf_records: self.max_leaf_records,
                ..Default::default()
            },
            piece_limitation: self.piece_limitation,
            rtree_fanout: DEFAULT_RTREE_FANOUT,
            repetitions,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rel {
    Contains,
    Intersects,
}

impl From<Rel> for Relationship {
    fn from(r: Rel) -> Self {
        match r {
            Rel::Contains => Relationship::Contains,
            Rel::Intersects => Relationship::Intersects,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic rectangle dataset (`id<TAB>WKT`).
    Generate {
        #[arg(long, default_value = "uniform")]
        distribution: Distribution,
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = 1e-4)]
        min_side: f64,
        #[arg(long, default_value_t = 1e-3)]
        max_side: f64,
        /// Perpendicular jitter of diagonal data, degrees.
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Validate a file of WKT lines and write it as a dataset.
    Ingest {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Write KNN-based query windows (`selectivity<TAB>WKT`).
    MakeQueries {
        #[arg(long, short)]
        dataset: PathBuf,
        /// Repeatable; defaults to 1%, 0.1%, 0.01% and 0.001%.
        #[arg(long = "selectivity")]
        selectivities: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Time query engines after checking them against the scan oracle.
    Bench {
        #[command(flatten)]
        run: QueryRun,
        /// Timed passes per window set (median reported).
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
    /// Insert, delete or hybrid workloads on the index.
    BenchMaintenance {
        #[arg(long, short)]
        dataset: PathBuf,
        /// insert, delete, hybrid (90% reads) or hybrid:<read fraction>.
        #[arg(long, default_value = "insert")]
        mode: MaintenanceMode,
        #[arg(long, default_value_t = 100)]
        transactions: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Check engines against the scan oracle without timing.
    Verify {
        #[command(flatten)]
        run: QueryRun,
    },
    /// Structure and size of the index, the R-tree baseline and the
    /// piecewise function over a dataset.
    Stats {
        #[arg(long, short)]
        dataset: PathBuf,
    },
}

#[derive(Args)]
struct QueryRun {
    #[arg(long, short)]
    dataset: PathBuf,
    #[arg(long, short)]
    queries: PathBuf,
    /// Comma-separated subset of glin, glin-piecewise, rtree, scan.
    #[arg(long)]
    engines: Option<String>,
    #[arg(long, value_enum, default_value_t = Rel::Contains)]
    relationship: Rel,
    /// Accepted for symmetry with the other commands; windows come from the queries file.
    #[arg(long)]
    seed: Option<u64>,
}

type LoadedRun = (
    Vec<(Geometry, GeomId)>,
    Vec<bench::QueryWindow>,
    Vec<Engine>,
    Relationship,
);

impl QueryRun {
    fn load(&self) -> Result<LoadedRun> {
        let records = load_dataset(&self.dataset)?;
        let queries = bench::read_queries(BufReader::new(File::open(&self.queries)?))?;
        let rel: Relationship = self.relationship.into();
        let engines = match &self.engines {
            Some(s) => bench::parse_engines(s)?,
            None => Engine::defaults_for(rel),
        };
        Ok((records, queries, engines, rel))
    }
}

fn load_dataset(path: &Path) -> Result<Vec<(Geometry, GeomId)>> {
    bench::read_dataset(BufReader::new(File::open(path)?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn emit_report(report: &MetricsReport, output: Output) -> Result<()> {
    let stdout = io::stdout().lock();
    match output {
        Output::Json => report.write_json(stdout),
        Output::Csv => report.write_csv(stdout),
    }
}

#[derive(Serialize)]
struct StatsReport {
    schema_version: u32,
    records: usize,
    kinds: KindCounts,
    glin: IndexStats,
    depth_bound: usize,
    piecewise: PiecewiseSummary,
    rtree: RTreeStats,
}

#[derive(Serialize, Default)]
struct KindCounts {
    point: usize,
    linestring: usize,
    polygon: usize,
}

#[derive(Serialize)]
struct PiecewiseSummary {
    piece_limitation: usize,
    pieces: usize,
    avg_diff: f64,
    size_bytes: usize,
}

impl From<&PiecewiseFunction> for PiecewiseSummary {
    fn from(p: &PiecewiseFunction) -> Self {
        Self {
            piece_limitation: p.piece_limitation(),
            pieces: p.len(),
            avg_diff: p.avg_diff(),
            size_bytes: p.size_bytes(),
        }
    }
}

fn count_kinds(records: &[(Geometry, GeomId)]) -> KindCounts {
    let mut k = KindCounts::default();
    for (g, _) in records {
        match g.kind() {
            GeometryKind::Point => k.point += 1,
            GeometryKind::LineString => k.linestring += 1,
            GeometryKind::Polygon => k.polygon += 1,
        }
    }
    k
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate {
            distribution,
            n,
            min_side,
            max_side,
            sigma,
            seed,
            out,
        } => {
            let p = GenParams {
                n,
                min_side,
                max_side,
                sigma,
                seed,
            };
            let data = bench::generate(distribution, &p)?;
            bench::write_dataset(create(&out)?, &data)?;
            eprintln!("wrote {} {distribution} rectangles to {}", data.len(), out.display());
        }
        Command::Ingest { input, out } => {
            let data = bench::read_wkt_lines(BufReader::new(File::open(&input)?))?;
            if data.is_empty() {
                return Err(GlinError::EmptyInput);
            }
            let cfg = CurveConfig::new(cli.index.cell_size)?;
            for (g, id) in &data {
                glin::zcurve::zitvl(g, &cfg).map_err(|e| GlinError::Dataset {
                    line: *id as usize + 1,
                    message: e.to_string(),
                })?;
            }
            bench::write_dataset(create(&out)?, &data)?;
            let k = count_kinds(&data);
            eprintln!(
                "ingested {} geometries ({} points, {} linestrings, {} polygons) into {}",
                data.len(),
                k.point,
                k.linestring,
                k.polygon,
                out.display()
            );
        }
        Command::MakeQueries {
            dataset,
            selectivities,
            count,
            seed,
            out,
        } => {
            let data = load_dataset(&dataset)?;
            let sels = if selectivities.is_empty() {
                bench::DEFAULT_SELECTIVITIES.to_vec()
            } else {
                selectivities
            };
            let mut all = Vec::new();
            for (i, &s) in sels.iter().enumerate() {
                let qs = bench::make_queries(&data, s, count, seed.wrapping_add(i as u64))?;
                let achieved: f64 = qs
                    .iter()
                    .map(|q| bench::achieved_selectivity(&data, &q.window))
                    .sum::<f64>()
                    / qs.len().max(1) as f64;
                eprintln!("selectivity {s}: {} windows, mean achieved {achieved:.6}", qs.len());
                all.extend(qs);
            }
            bench::write_queries(create(&out)?, &all)?;
        }
        Command::Bench { run, repetitions } => {
            let (records, queries, engines, rel) = run.load()?;
            let mut report = bench::bench(&records, &queries, &engines, rel, &cli.index.bench_config(repetitions)?)?;
            report.seed = run.seed;
            emit_report(&report, cli.output)?;
        }
        Command::BenchMaintenance {
            dataset,
            mode,
            transactions,
            seed,
        } => {
            let records = load_dataset(&dataset)?;
            let cfg = MaintenanceConfig {
                bench: cli.index.bench_config(1)?,
                seed,
                transactions,
                ..Default::default()
            };
            let report = bench::bench_maintenance(&records, mode, &cfg)?;
            emit_report(&report, cli.output)?;
        }
        Command::Verify { run } => {
            let (records, queries, engines, rel) = run.load()?;
            let mut report = bench::verify(&records, &queries, &engines, rel, &cli.index.bench_config(1)?)?;
            report.seed = run.seed;
            emit_report(&report, cli.output)?;
            let bad = report.total_mismatches();
            if bad > 0 {
                eprintln!("{bad} mismatching windows");
                return Ok(false);
            }
        }
        Command::Stats { dataset } => {
            let records = load_dataset(&dataset)?;
            let cfg = cli.index.bench_config(1)?;
            let kinds = count_kinds(&records);
            let idx = GlinIndex::bulk_load_with_piecewise(
                records.iter().cloned(),
                cfg.curve,
                cfg.params,
                cfg.piece_limitation,
            )?;
            let tree = StrRTree::bulk_load(records.iter().cloned(), cfg.rtree_fanout)?;
            let glin = idx.stats();
            let bound = (glin.leaf_count as f64).log(cfg.params.fanout as f64).ceil() as usize + 1;
            let report = StatsReport {
                schema_version: bench::SCHEMA_VERSION,
                records: records.len(),
                kinds,
                glin,
                depth_bound: bound,
                piecewise: idx.piecewise().expect("attached").into(),
                rtree: tree.stats(),
            };
            let mut out = io::stdout().lock();
            match cli.output {
                Output::Json => {
                    serde_json::to_writer_pretty(&mut out, &report)?;
                    writeln!(out)?;
                }
                Output::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record([
                        "schema_version",
                        "records",
                        "glin_nodes",
                        "glin_leaves",
                        "glin_depth",
                        "glin_metadata_bytes",
                        "pieces",
                        "avg_diff",
                        "rtree_nodes",
                        "rtree_metadata_bytes",
                    ])?;
                    w.write_record([
                        report.schema_version.to_string(),
                        report.records.to_string(),
                        glin.node_count.to_string(),
                        glin.leaf_count.to_string(),
                        glin.depth.to_string(),
                        glin.metadata_bytes.to_string(),
                        report.piecewise.pieces.to_string(),
                        report.piecewise.avg_diff.to_string(),
                        report.rtree.node_count.to_string(),
                        report.rtree.metadata_bytes.to_string(),
                    ])?;
                    w.flush()?;
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
