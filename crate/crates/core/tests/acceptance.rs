// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Acceptance suite. Runs every criterion in order and prints one line per
//! criterion; exits non-zero if any fails.

use std::io::BufReader;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glin::augment::{Piece, PiecewiseFunction};
use glin::bench::{self, BenchConfig, Distribution, GenParams, MaintenanceConfig, MaintenanceMode};
use glin::geometry::{Coordinate, Geometry};
use glin::index::{BuildParams, GeomId, GlinIndex, QueryOptions, Relationship};
use glin::oracle::{multiset_diff, FlatStore, StrRTree};
use glin::zcurve::{
    interval_contains, interval_intersects, morton_decode, morton_encode, zitvl, CellCoord, CurveConfig, ZAddress,
    ZInterval, MAX_X_CELLS, MAX_Y_CELLS,
};

type Records = Vec<(Geometry, GeomId)>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn random_cell(rng: &mut ChaCha8Rng) -> CellCoord {
    CellCoord::new(
        rng.random_range(0..MAX_X_CELLS as u32),
        rng.random_range(0..MAX_Y_CELLS as u32),
    )
}

fn c1_morton_fixed_points() -> Outcome {
    let t0 = Instant::now();
    let fixed = [((0, 0), 0u64), ((0, 1), 2), ((1, 3), 11)];
    let fixed_ok = fixed
        .iter()
        .all(|&((x, y), z)| morton_encode(CellCoord::new(x, y)) == ZAddress(z));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..1_000_000 {
        let c = random_cell(&mut rng);
        if morton_decode(morton_encode(c)) != c {
            bad += 1;
        }
    }
    let el = t0.elapsed();
    outcome(
        fixed_ok && bad == 0 && within(el, Duration::from_secs(1)),
        format!("fixed points ok={fixed_ok}, round-trip failures {bad}/1e6, {el:.2?} (limit 1s)"),
    )
}

fn c2_dominance() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..1_000_000 {
        let a = random_cell(&mut rng);
        let b = CellCoord::new(
            rng.random_range(a.x..MAX_X_CELLS as u32),
            rng.random_range(a.y..MAX_Y_CELLS as u32),
        );
        if morton_encode(a) > morton_encode(b) {
            violations += 1;
        }
    }
    let el = t0.elapsed();
    outcome(
        violations == 0 && within(el, Duration::from_secs(5)),
        format!("violations {violations}/1e6 dominated pairs, {el:.2?} (limit 5s)"),
    )
}

/// Star-shaped polygon around a random center; concave for most draws.
fn random_polygon(rng: &mut ChaCha8Rng, cx: f64, cy: f64, scale: f64) -> Geometry {
    let k = rng.random_range(3..10);
    let mut ring: Vec<Coordinate> = (0..k)
        .map(|i| {
            let a = (i as f64 + rng.random_range(0.0..0.8)) * std::f64::consts::TAU / k as f64;
            let r = scale * rng.random_range(0.3..1.0);
            Coordinate::new(
                (cx + r * a.cos()).clamp(-180.0, 180.0),
                (cy + r * a.sin()).clamp(-90.0, 90.0),
            )
        })
        .collect();
    ring.push(ring[0]);
    Geometry::polygon(ring, vec![]).expect("valid ring")
}

fn c3_interval_implication() -> Outcome {
    let t0 = Instant::now();
    let cfg = CurveConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut held = [0usize; 2];
    let mut counterexamples = [0usize; 2];
    for (i, rel) in [Relationship::Contains, Relationship::Intersects]
        .into_iter()
        .enumerate()
    {
        for _ in 0..100_000 {
            let cx = rng.random_range(-179.0..179.0);
            let cy = rng.random_range(-89.0..89.0);
            let qs = rng.random_range(1e-4..0.5);
            let q = random_polygon(&mut rng, cx, cy, qs);
            let gs = match rel {
                Relationship::Contains => qs * rng.random_range(0.01..0.4),
                Relationship::Intersects => qs * rng.random_range(0.05..2.0),
            };
            let off = qs * 0.8;
            let gx = cx + rng.random_range(-off..off);
            let gy = cy + rng.random_range(-off..off);
            let g = random_polygon(&mut rng, gx, gy, gs);
            if !rel.holds(&q, &g) {
                continue;
            }
            held[i] += 1;
            let zq = zitvl(&q, &cfg).unwrap();
            let zg = zitvl(&g, &cfg).unwrap();
            let ok = match rel {
                Relationship::Contains => interval_contains(&zq, &zg),
                Relationship::Intersects => interval_intersects(&zq, &zg),
            };
            if !ok {
                counterexamples[i] += 1;
            }
        }
    }
    let el = t0.elapsed();
    outcome(
        counterexamples == [0, 0] && held.iter().all(|&h| h > 0) && within(el, Duration::from_secs(60)),
        format!(
            "contains: {} true pairs, {} counterexamples; intersects: {} true pairs, {} counterexamples; {el:.2?} (limit 60s)",
            held[0], counterexamples[0], held[1], counterexamples[1]
        ),
    )
}

fn fixture() -> Records {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/mixed_10k.wkt");
    bench::read_wkt_lines(BufReader::new(std::fs::File::open(path).expect("fixture"))).expect("fixture parses")
}

fn c4_oracle_equivalence(uniform: &Records, diagonal: &Records, mixed: &Records) -> Outcome {
    let t0 = Instant::now();
    let cfg = BenchConfig::default();
    let mut windows = 0;
    let mut mismatched = 0;
    let mut results = 0usize;
    let mut first = String::new();
    for (name, data) in [("uniform", uniform), ("diagonal", diagonal), ("fixture", mixed)] {
        let store = FlatStore::from_records(data.iter().cloned()).unwrap();
        let glin = GlinIndex::bulk_load(data.iter().cloned(), cfg.curve, cfg.params).unwrap();
        let mut glin_pw = glin.clone();
        glin_pw.attach_piecewise(cfg.piece_limitation);
        for (si, sel) in [0.01, 0.001, 0.0001].into_iter().enumerate() {
            let qs = bench::make_queries(data, sel, 100, 40 + si as u64).unwrap();
            for q in &qs {
                for (rel, idx) in [(Relationship::Contains, &glin), (Relationship::Intersects, &glin_pw)] {
                    let got = idx.range_query(&q.window, rel).unwrap();
                    let want = store.query(&q.window, rel);
                    results += want.len();
                    windows += 1;
                    let (m, u) = multiset_diff(&want, &got);
                    if !m.is_empty() || !u.is_empty() {
                        mismatched += 1;
                        if first.is_empty() {
                            first = format!(" first: {name} {sel} {rel} missing {m:?} unexpected {u:?}");
                        }
                    }
                }
            }
        }
    }
    let el = t0.elapsed();
    outcome(
        mismatched == 0 && windows == 1800 && within(el, Duration::from_secs(600)),
        format!("{mismatched}/{windows} windows differ from scan ({results} true results total), {el:.2?} (limit 10min){first}"),
    )
}

fn c5_augmentation_necessity() -> Outcome {
    let cfg = CurveConfig::new(1.0).unwrap();
    let rect =
        |x0: f64, y0: f64, x1: f64, y1: f64| Geometry::rect(-180.0 + x0, -90.0 + y0, -180.0 + x1, -90.0 + y1).unwrap();
    // window over cells (0,1)..(1,3): Z-interval [2, 11]
    let q = rect(0.2, 1.2, 1.8, 3.8);
    let data: Records = vec![
        (rect(0.4, 1.4, 0.6, 1.6), 1),     // inside the window
        (rect(0.1, 0.1, 0.5, 1.5), 2),     // crosses the bottom edge, starts in cell (0,0)
        (rect(0.05, 0.05, 1.95, 3.95), 3), // covers the window
        (rect(0.1, 0.1, 0.3, 0.3), 4),     // below the window, same start cell
        (rect(3.2, 3.2, 3.8, 3.8), 5),     // far away
        (rect(1.5, 2.5, 2.5, 2.9), 6),     // crosses the right edge
    ];
    let store = FlatStore::from_records(data.clone()).unwrap();
    let mut want = store.query(&q, Relationship::Intersects);
    want.sort_unstable();
    let idx = GlinIndex::bulk_load(data, cfg, BuildParams::default()).unwrap();
    let plain_opts = QueryOptions {
        augment: false,
        skip_leaves: true,
    };
    let (mut plain, _) = idx.search(&q, Relationship::Intersects, plain_opts).unwrap();
    plain.sort_unstable();
    let mut with_pw = idx.clone();
    with_pw.attach_piecewise(2);
    let mut full = with_pw.range_query(&q, Relationship::Intersects).unwrap();
    full.sort_unstable();
    let (missed, _) = multiset_diff(&want, &plain);
    outcome(
        !missed.is_empty() && full == want,
        format!("oracle {want:?}; plain scan {plain:?} misses {missed:?}; with piecewise {full:?}"),
    )
}

fn c6_augment_trace() -> Outcome {
    let piece = |end: u64, min: u64| Piece {
        zmax_end: ZAddress(end),
        min_zmin: ZAddress(min),
        sum_zmin: min as u128,
        count: 1,
    };
    let pw = PiecewiseFunction::from_pieces(vec![piece(5, 1), piece(9, 3), piece(12, 0), piece(14, 12)], 1);
    let a = pw.augment(ZInterval::new(6, 10));
    let b = pw.augment(ZInterval::new(13, 14));
    let pass = a == ZInterval::new(0, 10) && b == ZInterval::new(12, 14);
    outcome(
        pass,
        format!(
            "[6,10] -> [{},{}], [13,14] -> [{},{}]",
            a.zmin.0, a.zmax.0, b.zmin.0, b.zmax.0
        ),
    )
}

fn c7_leaf_skip(diagonal: &Records) -> Outcome {
    let cfg = BenchConfig::default();
    let idx = GlinIndex::bulk_load(diagonal.iter().cloned(), cfg.curve, cfg.params).unwrap();
    let qs = bench::make_queries(diagonal, 0.0001, 100, 7).unwrap();
    let mut ratios = Vec::new();
    let (mut with, mut without) = (Vec::new(), Vec::new());
    for q in &qs {
        let on = QueryOptions {
            augment: true,
            skip_leaves: true,
        };
        let off = QueryOptions {
            skip_leaves: false,
            ..on
        };
        let (r1, a) = idx.search(&q.window, Relationship::Contains, on).unwrap();
        let (r2, b) = idx.search(&q.window, Relationship::Contains, off).unwrap();
        assert_eq!(r1, r2, "skipping changed a result");
        assert!(a.candidates <= b.candidates);
        ratios.push(a.candidates as f64 / b.candidates.max(1) as f64);
        with.push(a.candidates);
        without.push(b.candidates);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| a.total_cmp(b));
        (v[v.len() / 2 - 1] + v[v.len() / 2]) / 2.0
    };
    let med_ratio = median(&mut ratios);
    let total_with: u64 = with.iter().sum();
    let total_without: u64 = without.iter().sum();
    let strict = total_with < total_without;
    let mut wf: Vec<f64> = with.iter().map(|&c| c as f64).collect();
    let mut wof: Vec<f64> = without.iter().map(|&c| c as f64).collect();
    let (mw, mwo) = (median(&mut wf), median(&mut wof));
    outcome(
        med_ratio <= 0.5,
        format!(
            "median per-window ratio {med_ratio:.3} (bar 0.5); median counts {mw} vs {mwo}; total {total_with} vs {total_without} (ratio {:.3}, strict reduction {strict})",
            total_with as f64 / total_without as f64
        ),
    )
}

fn c8_storage() -> Outcome {
    let t0 = Instant::now();
    let data = bench::generate(
        Distribution::Uniform,
        &GenParams {
            n: 1_000_000,
            seed: 8,
            ..Default::default()
        },
    )
    .unwrap();
    let idx = GlinIndex::bulk_load(data.iter().cloned(), CurveConfig::default(), BuildParams::default()).unwrap();
    let g = idx.stats();
    let tree = StrRTree::bulk_load(data, 16).unwrap();
    let r = tree.stats();
    let el = t0.elapsed();
    outcome(
        g.metadata_bytes * 10 <= r.metadata_bytes && within(el, Duration::from_secs(120)),
        format!(
            "glin {} B ({} nodes) vs rtree {} B ({} nodes): ratio 1/{:.1}, {el:.2?} (limit 2min)",
            g.metadata_bytes,
            g.node_count,
            r.metadata_bytes,
            r.node_count,
            r.metadata_bytes as f64 / g.metadata_bytes as f64
        ),
    )
}

fn maintenance_config() -> MaintenanceConfig {
    MaintenanceConfig {
        seed: 9,
        transactions: 100,
        ..Default::default()
    }
}

fn c9_maintenance(uniform: &Records) -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for mode in [
        MaintenanceMode::Insert,
        MaintenanceMode::Delete,
        MaintenanceMode::Hybrid { read_fraction: 0.9 },
        MaintenanceMode::Hybrid { read_fraction: 0.5 },
    ] {
        match bench::bench_maintenance(uniform, mode, &maintenance_config()) {
            Ok(r) => {
                let run = &r.runs[0];
                let label = match mode {
                    MaintenanceMode::Hybrid { read_fraction } => format!("hybrid {read_fraction}"),
                    m => m.to_string(),
                };
                pass &= r.total_mismatches() == 0;
                lines.push(format!(
                    "{label}: {} ops, {} mismatches",
                    run.operations, run.mismatches
                ));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("{mode}: {e}"));
            }
        }
    }
    outcome(pass, lines.join("; "))
}

fn c10_throughput(uniform: &Records) -> Outcome {
    let mut rates = Vec::new();
    for mode in [MaintenanceMode::Insert, MaintenanceMode::Delete] {
        let r = bench::bench_maintenance(uniform, mode, &maintenance_config()).unwrap();
        rates.push(r.runs[0].throughput_ops_per_sec);
    }
    outcome(
        rates.iter().all(|&r| r >= 1e5),
        format!("insert {:.0} ops/s, delete {:.0} ops/s (floor 1e5)", rates[0], rates[1]),
    )
}

fn c11_avg_diff(uniform: &Records) -> Outcome {
    let k = 10_000;
    let cfg = CurveConfig::default();
    let mut idx = GlinIndex::bulk_load_with_piecewise(uniform.iter().cloned(), cfg, BuildParams::default(), k).unwrap();
    let fresh = idx.piecewise().unwrap().clone();
    let before = fresh.avg_diff();
    let pieces = fresh.pieces();
    let target = pieces.len() / 2;
    let lo = pieces[target - 1].zmax_end.0 + 1;
    let hi = pieces[target].zmax_end.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cs = cfg.cell_size();
    let center = |c: CellCoord| Coordinate::new((c.x as f64 + 0.5) * cs - 180.0, (c.y as f64 + 0.5) * cs - 90.0);
    let limit = cfg.max_cell();
    let mut next_id = 10_000_000;
    while next_id < 10_000_000 + 10 * k as u64 {
        let top = morton_decode(ZAddress(rng.random_range(lo..=hi)));
        if top.x > limit.x || top.y > limit.y {
            continue;
        }
        let dx = rng.random_range(0..=top.x.min(2_000_000));
        let dy = rng.random_range(0..=top.y.min(2_000_000));
        let bottom = CellCoord::new(top.x - dx, top.y - dy);
        let (p, q) = (center(bottom), center(top));
        let g = if dx == 0 || dy == 0 {
            Geometry::line_string(vec![p, q]).unwrap()
        } else {
            Geometry::rect(p.lon, p.lat, q.lon, q.lat).unwrap()
        };
        idx.insert(g, next_id).unwrap();
        next_id += 1;
    }
    let degraded = idx.piecewise().unwrap();
    let after = degraded.avg_diff();
    let grown = degraded.pieces()[target].count;
    let same_shape = degraded.len() == fresh.len();
    idx.rebuild_piecewise();
    idx.audit().unwrap();
    let rebuilt = idx.piecewise().unwrap();
    let max_count = rebuilt.pieces().iter().map(|p| p.count).max().unwrap();
    outcome(
        after > before && max_count <= k as u64 && same_shape,
        format!(
            "avg_diff {before:.4} -> {after:.4} after {} in-bound inserts (piece {target} holds {grown}); rebuilt {} pieces, largest {max_count} (limit {k})",
            10 * k,
            rebuilt.len()
        ),
    )
}

fn main() -> ExitCode {
    let gen = |kind, seed| {
        bench::generate(
            kind,
            &GenParams {
                n: 100_000,
                seed,
                ..Default::default()
            },
        )
        .unwrap()
    };
    let uniform = gen(Distribution::Uniform, 100);
    let diagonal = gen(Distribution::Diagonal, 200);
    let mixed = fixture();

    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (
            "C1 Morton fixed points and round trip",
            Box::new(c1_morton_fixed_points),
        ),
        ("C2 dominance preserves code order", Box::new(c2_dominance)),
        ("C3 predicate implies interval condition", Box::new(c3_interval_implication)),
        (
            "C4 oracle equivalence",
            Box::new(|| c4_oracle_equivalence(&uniform, &diagonal, &mixed)),
        ),
        ("C5 augmentation necessity", Box::new(c5_augmentation_necessity)),
        ("C6 augment trace", Box::new(c6_augment_trace)),
        ("C7 leaf-MBR skip effect", Box::new(|| c7_leaf_skip(&diagonal))),
        ("C8 storage direction", Box::new(c8_storage)),
        ("C9 maintenance correctness", Box::new(|| c9_maintenance(&uniform))),
        ("C10 maintenance throughput", Box::new(|| c10_throughput(&uniform))),
        (
            "C11 avg_diff degradation and rebuild",
            Box::new(|| c11_avg_diff(&uniform)),
        ),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
