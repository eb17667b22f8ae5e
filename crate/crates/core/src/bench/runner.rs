// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Query benchmarks and oracle verification.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::info;
use serde::{Deserialize, Serialize};

use super::dataset::QueryWindow;
use super::queries::achieved_selectivity;
use super::report::{MetricsReport, RunMetrics};
use crate::augment::DEFAULT_PIECE_LIMITATION;
use crate::error::{GlinError, Result};
use crate::geometry::Geometry;
use crate::index::{BuildParams, GeomId, GlinIndex, QueryOptions, Relationship};
use crate::oracle::{multiset_diff, FlatStore, StrRTree, DEFAULT_RTREE_FANOUT};
use crate::zcurve::CurveConfig;

/// Query engines that can be benchmarked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    /// The index without a piecewise function; Contains only.
    Glin,
    /// The index with a piecewise function attached.
    GlinPiecewise,
    /// Packed STR R-tree.
    RTree,
    /// Brute-force scan.
    Scan,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Glin, Engine::GlinPiecewise, Engine::RTree, Engine::Scan];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Glin => "glin",
            Engine::GlinPiecewise => "glin-piecewise",
            Engine::RTree => "rtree",
            Engine::Scan => "scan",
        }
    }

    /// Engines meaningful for `rel`: plain GLIN is Contains-only.
    pub fn defaults_for(rel: Relationship) -> Vec<Engine> {
        match rel {
            Relationship::Contains => Self::ALL.to_vec(),
            Relationship::Intersects => vec![Engine::GlinPiecewise, Engine::RTree, Engine::Scan],
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = GlinError;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| GlinError::InvalidParam(format!("unknown engine `{s}`")))
    }
}

/// Parses a comma-separated engine list.
pub fn parse_engines(s: &str) -> Result<Vec<Engine>> {
    let mut out: Vec<Engine> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let e: Engine = part.parse()?;
        if !out.contains(&e) {
            out.push(e);
        }
    }
    if out.is_empty() {
        return Err(GlinError::InvalidParam("no engines given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub curve: CurveConfig,
    pub params: BuildParams,
    pub piece_limitation: usize,
    pub rtree_fanout: usize,
    /// Timed passes per window set; the median is reported.
    pub repetitions: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            curve: CurveConfig::default(),
            params: BuildParams::default(),
            piece_limitation: DEFAULT_PIECE_LIMITATION,
            rtree_fanout: DEFAULT_RTREE_FANOUT,
            repetitions: 5,
        }
    }
}

/// Work done by one engine on one window.
#[derive(Debug, Clone, Default)]
pub struct Answer {
    pub ids: Vec<GeomId>,
    pub candidates: u64,
    pub probe: Duration,
    pub refine: Duration,
}

/// An engine built over a dataset.
pub enum BuiltEngine {
    Glin(GlinIndex),
    GlinPiecewise(GlinIndex),
    RTree(StrRTree),
    Scan(FlatStore),
}

impl BuiltEngine {
    pub fn build(engine: Engine, records: &[(Geometry, GeomId)], cfg: &BenchConfig) -> Result<Self> {
        let data = records.iter().cloned();
        Ok(match engine {
            Engine::Glin => BuiltEngine::Glin(GlinIndex::bulk_load(data, cfg.curve, cfg.params)?),
            Engine::GlinPiecewise => BuiltEngine::GlinPiecewise(GlinIndex::bulk_load_with_piecewise(
                data,
                cfg.curve,
                cfg.params,
                cfg.piece_limitation,
            )?),
            Engine::RTree => BuiltEngine::RTree(StrRTree::bulk_load(data, cfg.rtree_fanout)?),
            Engine::Scan => BuiltEngine::Scan(FlatStore::from_records(data)?),
        })
    }

    pub fn answer(&self, q: &Geometry, rel: Relationship) -> Result<Answer> {
        self.answer_with(q, rel, true)
    }

    /// `skip_leaves` only affects the GLIN engines.
    pub fn answer_with(&self, q: &Geometry, rel: Relationship, skip_leaves: bool) -> Result<Answer> {
        match self {
            BuiltEngine::Glin(idx) | BuiltEngine::GlinPiecewise(idx) => {
                let opts = QueryOptions {
                    augment: true,
                    skip_leaves,
                };
                let (ids, s) = idx.search(q, rel, opts)?;
                Ok(Answer {
                    ids,
                    candidates: s.candidates,
                    probe: s.probe_time,
                    refine: s.refine_time,
                })
            }
            BuiltEngine::RTree(t) => {
                let t0 = Instant::now();
                let cands = t.probe(&q.mbr(), rel);
                let t1 = Instant::now();
                let ids = t.refine(&cands, q, rel);
                Ok(Answer {
                    candidates: cands.len() as u64,
                    ids,
                    probe: t1 - t0,
                    refine: t1.elapsed(),
                })
            }
            BuiltEngine::Scan(s) => {
                let t0 = Instant::now();
                let ids = s.query(q, rel);
                Ok(Answer {
                    candidates: s.len() as u64,
                    ids,
                    probe: Duration::ZERO,
                    refine: t0.elapsed(),
                })
            }
        }
    }

    /// `(metadata_bytes, node_count, leaf_count)`.
    pub fn footprint(&self) -> (usize, usize, Option<usize>) {
        match self {
            BuiltEngine::Glin(idx) | BuiltEngine::GlinPiecewise(idx) => {
                let s = idx.stats();
                let pw = idx.piecewise().map_or(0, |p| p.size_bytes());
                (s.metadata_bytes + pw, s.node_count, Some(s.leaf_count))
            }
            BuiltEngine::RTree(t) => {
                let s = t.stats();
                (s.metadata_bytes, s.node_count, None)
            }
            BuiltEngine::Scan(_) => (0, 0, None),
        }
    }

    fn is_glin(&self) -> bool {
        matches!(self, BuiltEngine::Glin(_) | BuiltEngine::GlinPiecewise(_))
    }
}

fn check_engines(engines: &[Engine], rel: Relationship) -> Result<()> {
    if rel == Relationship::Intersects && engines.contains(&Engine::Glin) {
        return Err(GlinError::InvalidParam(
            "engine `glin` answers contains queries only; use `glin-piecewise` for intersects".into(),
        ));
    }
    Ok(())
}

/// Windows grouped by selectivity, in first-appearance order.
fn group_by_selectivity(queries: &[QueryWindow]) -> Vec<(f64, Vec<&Geometry>)> {
    let mut groups: Vec<(f64, Vec<&Geometry>)> = Vec::new();
    for q in queries {
        match groups.iter_mut().find(|g| g.0 == q.selectivity) {
            Some(g) => g.1.push(&q.window),
            None => groups.push((q.selectivity, vec![&q.window])),
        }
    }
    groups
}

/// Per-engine, per-selectivity timings and counts. Every engine's answers
/// are checked against the scan oracle first; any mismatch aborts with
/// [`GlinError::ResultMismatch`] and no timings.
pub fn bench(
    records: &[(Geometry, GeomId)],
    queries: &[QueryWindow],
    engines: &[Engine],
    rel: Relationship,
    cfg: &BenchConfig,
) -> Result<MetricsReport> {
    check_engines(engines, rel)?;
    if records.is_empty() {
        return Err(GlinError::EmptyInput);
    }
    let groups = group_by_selectivity(queries);
    let oracle = FlatStore::from_records(records.iter().cloned())?;
    let truth: Vec<Vec<Vec<GeomId>>> = groups
        .iter()
        .map(|(_, ws)| ws.iter().map(|w| oracle.query(w, rel)).collect())
        .collect();
    let achieved: Vec<f64> = groups
        .iter()
        .map(|(_, ws)| ws.iter().map(|w| achieved_selectivity(records, w)).sum::<f64>() / ws.len().max(1) as f64)
        .collect();

    let mut report = MetricsReport::new("bench", records.len(), None);
    for &engine in engines {
        let t0 = Instant::now();
        let built = BuiltEngine::build(engine, records, cfg)?;
        let build_time = t0.elapsed();
        let (bytes, nodes, leaves) = built.footprint();
        info!("{engine}: built in {build_time:?}");

        for (gi, (sel, windows)) in groups.iter().enumerate() {
            let mut candidates = 0;
            let mut without_skip = 0;
            let mut results = 0;
            for (wi, w) in windows.iter().enumerate() {
                let a = built.answer(w, rel)?;
                let (missing, unexpected) = multiset_diff(&truth[gi][wi], &a.ids);
                if !missing.is_empty() || !unexpected.is_empty() {
                    return Err(GlinError::ResultMismatch {
                        engine: engine.name().to_string(),
                        window: w.to_wkt(),
                        missing,
                        unexpected,
                    });
                }
                candidates += a.candidates;
                results += a.ids.len() as u64;
                if built.is_glin() {
                    without_skip += built.answer_with(w, rel, false)?.candidates;
                }
            }

            let mut reps = Vec::with_capacity(cfg.repetitions.max(1));
            for _ in 0..cfg.repetitions.max(1) {
                let (mut probe, mut refine) = (Duration::ZERO, Duration::ZERO);
                let start = Instant::now();
                for w in windows {
                    let a = built.answer(w, rel)?;
                    probe += a.probe;
                    refine += a.refine;
                }
                reps.push((start.elapsed(), probe, refine));
            }
            reps.sort_by_key(|r| r.0);
            let (total, probe, refine) = reps[reps.len() / 2];
            report.runs.push(RunMetrics {
                engine: engine.name().to_string(),
                workload: "query".into(),
                relationship: Some(rel),
                selectivity: Some(*sel),
                achieved_selectivity: Some(achieved[gi]),
                windows: windows.len(),
                operations: windows.len(),
                build_time_ns: build_time.as_nanos() as u64,
                probe_time_ns: probe.as_nanos() as u64,
                refine_time_ns: refine.as_nanos() as u64,
                total_time_ns: total.as_nanos() as u64,
                candidates_checked: candidates,
                candidates_without_skip: built.is_glin().then_some(without_skip),
                result_count: results,
                metadata_bytes: bytes,
                node_count: nodes,
                leaf_count: leaves,
                throughput_ops_per_sec: windows.len() as f64 / total.as_secs_f64().max(1e-12),
                ..Default::default()
            });
        }
    }
    Ok(report)
}

/// Oracle equivalence only: counts mismatching windows per engine and
/// selectivity, without timing anything.
pub fn verify(
    records: &[(Geometry, GeomId)],
    queries: &[QueryWindow],
    engines: &[Engine],
    rel: Relationship,
    cfg: &BenchConfig,
) -> Result<MetricsReport> {
    check_engines(engines, rel)?;
    if records.is_empty() {
        return Err(GlinError::EmptyInput);
    }
    let groups = group_by_selectivity(queries);
    let oracle = FlatStore::from_records(records.iter().cloned())?;
    let mut report = MetricsReport::new("verify", records.len(), None);
    let built: Vec<(Engine, BuiltEngine)> = engines
        .iter()
        .map(|&e| BuiltEngine::build(e, records, cfg).map(|b| (e, b)))
        .collect::<Result<_>>()?;
    for (sel, windows) in &groups {
        let truth: Vec<Vec<GeomId>> = windows.iter().map(|w| oracle.query(w, rel)).collect();
        for (engine, b) in &built {
            let mut mismatches = 0;
            let mut results = 0;
            let mut candidates = 0;
            for (w, t) in windows.iter().zip(&truth) {
                let a = b.answer(w, rel)?;
                let (m, u) = multiset_diff(t, &a.ids);
                if !m.is_empty() || !u.is_empty() {
                    log::warn!("{engine}: window {w} missing {m:?} unexpected {u:?}");
                    mismatches += 1;
                }
                results += a.ids.len() as u64;
                candidates += a.candidates;
            }
            report.runs.push(RunMetrics {
                engine: engine.name().to_string(),
                workload: "query".into(),
                relationship: Some(rel),
                selectivity: Some(*sel),
                windows: windows.len(),
                operations: windows.len(),
                mismatches,
                candidates_checked: candidates,
                result_count: results,
                ..Default::default()
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::datagen::{generate, Distribution, GenParams};
    use crate::bench::queries::make_queries;

    fn small() -> (Vec<(Geometry, GeomId)>, Vec<QueryWindow>) {
        let data = generate(
            Distribution::Uniform,
            &GenParams {
                n: 3000,
                ..Default::default()
            },
        )
        .unwrap();
        let mut qs = make_queries(&data, 0.01, 10, 1).unwrap();
        qs.extend(make_queries(&data, 0.001, 10, 2).unwrap());
        (data, qs)
    }

    fn quick() -> BenchConfig {
        BenchConfig {
            repetitions: 1,
            piece_limitation: 100,
            ..Default::default()
        }
    }

    #[test]
    fn engines_parse() {
        assert_eq!(
            parse_engines("glin,rtree,glin").unwrap(),
            vec![Engine::Glin, Engine::RTree]
        );
        assert!(parse_engines("btree").is_err());
        assert!(parse_engines("").is_err());
    }

    #[test]
    fn scan_alone_has_no_mismatches() {
        let (data, qs) = small();
        let r = bench(&data, &qs, &[Engine::Scan], Relationship::Intersects, &quick()).unwrap();
        assert_eq!(r.total_mismatches(), 0);
        assert_eq!(r.runs.len(), 2);
    }

    #[test]
    fn glin_rejected_for_intersects() {
        let (data, qs) = small();
        let err = bench(&data, &qs, &[Engine::Glin], Relationship::Intersects, &quick()).unwrap_err();
        assert!(matches!(err, GlinError::InvalidParam(_)));
    }

    #[test]
    fn all_engines_agree_and_skip_helps() {
        let (data, qs) = small();
        for rel in [Relationship::Contains, Relationship::Intersects] {
            let r = bench(&data, &qs, &Engine::defaults_for(rel), rel, &quick()).unwrap();
            for run in r.runs.iter().filter(|r| r.candidates_without_skip.is_some()) {
                assert!(run.candidates_checked <= run.candidates_without_skip.unwrap());
            }
            let v = verify(&data, &qs, &Engine::defaults_for(rel), rel, &quick()).unwrap();
            assert_eq!(v.total_mismatches(), 0);
        }
    }
}
