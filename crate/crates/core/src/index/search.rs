// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Range queries: probe by key range, refine with exact predicates.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{GeomId, GlinIndex, NodeId};
use crate::error::{GlinError, Result};
use crate::geometry::{contains, intersects, Geometry};
use crate::zcurve::{zitvl, ZInterval};

/// Spatial relationship between a query window and a stored geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relationship {
    /// The window contains the geometry.
    Contains,
    /// The window and the geometry share at least one point.
    Intersects,
}

impl Relationship {
    /// Exact predicate `rel(q, g)`.
    pub fn holds(self, q: &Geometry, g: &Geometry) -> bool {
        match self {
            Relationship::Contains => contains(q, g),
            Relationship::Intersects => intersects(q, g),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relationship::Contains => "contains",
            Relationship::Intersects => "intersects",
        }
    }
}

impl fmt::Display for Relationship {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relationship {
    type Err = GlinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "contains" => Ok(Relationship::Contains),
            "intersects" => Ok(Relationship::Intersects),
            other => Err(GlinError::InvalidParam(format!("unknown relationship `{other}`"))),
        }
    }
}

/// Knobs for [`GlinIndex::search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryOptions {
    /// Widen Intersects windows with the attached piecewise function.
    pub augment: bool,
    /// Skip leaves whose MBR misses the window.
    pub skip_leaves: bool,
}

impl Default for QueryOptions {
    fn default() -> Self {
        Self {
            augment: true,
            skip_leaves: true,
        }
    }
}

/// Work done by one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    /// Records handed to the exact predicate.
    pub candidates: u64,
    pub results: u64,
    pub leaves_visited: u64,
    pub leaves_skipped: u64,
    /// Key range actually scanned.
    pub scan_zmin: u64,
    pub scan_zmax: u64,
    #[serde(with = "duration_nanos")]
    pub probe_time: Duration,
    #[serde(with = "duration_nanos")]
    pub refine_time: Duration,
}

mod duration_nanos {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_nanos() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_nanos)
    }
}

impl GlinIndex {
    /// All records in relationship `rel` with `q`, in key order.
    ///
    /// Intersects needs a piecewise function (see
    /// [`attach_piecewise`](Self::attach_piecewise)); without one it returns
    /// an error because the plain scan range can miss results.
    pub fn range_query(&self, q: &Geometry, rel: Relationship) -> Result<Vec<GeomId>> {
        if rel == Relationship::Intersects && self.piecewise.is_none() {
            return Err(GlinError::InvalidParam(
                "intersects queries need an attached piecewise function".into(),
            ));
        }
        Ok(self.search(q, rel, QueryOptions::default())?.0)
    }

    /// Query with explicit options, also returning work counters.
    ///
    /// With `augment` off (or no piecewise function attached) an Intersects
    /// query scans only `[zmin_Q, zmax_Q]` and may miss geometries that start
    /// before the window.
    pub fn search(&self, q: &Geometry, rel: Relationship, opts: QueryOptions) -> Result<(Vec<GeomId>, QueryStats)> {
        let mut out = Vec::new();
        let stats = self.search_with(q, rel, opts, |id| out.push(id))?;
        Ok((out, stats))
    }

    /// Streams matching ids to `sink`.
    pub fn search_with(
        &self,
        q: &Geometry,
        rel: Relationship,
        opts: QueryOptions,
        mut sink: impl FnMut(GeomId),
    ) -> Result<QueryStats> {
        let zq = zitvl(q, &self.cfg)?;
        let mut stats = QueryStats::default();
        if self.len == 0 {
            return Ok(stats);
        }
        let scan = match (rel, &self.piecewise) {
            (Relationship::Intersects, Some(pw)) if opts.augment => pw.augment(zq),
            _ => zq,
        };
        stats.scan_zmin = scan.zmin.0;
        stats.scan_zmax = scan.zmax.0;
        let q_mbr = q.mbr();

        let probe_start = Instant::now();
        let start = self.route(scan.zmin.0);
        stats.probe_time = probe_start.elapsed();

        let refine_start = Instant::now();
        let mut current: Option<NodeId> = Some(start);
        let mut first = true;
        while let Some(id) = current {
            let leaf = self.leaf(id);
            current = leaf.next;
            let from = if first {
                first = false;
                match leaf.lower_bound(scan.zmin.0) {
                    Some(s) => s,
                    None => continue,
                }
            } else {
                match leaf.first_key() {
                    None => continue,
                    Some(k) if k > scan.zmax.0 => break,
                    Some(_) => 0,
                }
            };
            if leaf.keys[from] > scan.zmax.0 {
                break;
            }
            stats.leaves_visited += 1;
            if opts.skip_leaves && !leaf.mbr.is_some_and(|m| m.intersects(&q_mbr)) {
                stats.leaves_skipped += 1;
                continue;
            }
            for slot in from..leaf.capacity() {
                if leaf.keys[slot] > scan.zmax.0 {
                    // trailing gaps hold the sentinel: the leaf ends, the scan goes on
                    if leaf.is_occupied(slot) || leaf.keys[slot] != u64::MAX {
                        current = None;
                    }
                    break;
                }
                if !leaf.is_occupied(slot) {
                    continue;
                }
                let r = self.record(leaf.slots[slot]);
                if !passes_interval(rel, &zq, r.key.0, r.zmax.0) {
                    continue;
                }
                stats.candidates += 1;
                if r.mbr.intersects(&q_mbr) && rel.holds(q, &r.geometry) {
                    stats.results += 1;
                    sink(r.id);
                }
            }
        }
        stats.refine_time = refine_start.elapsed();
        Ok(stats)
    }
}

/// Interval filter applied before the exact predicate: the geometry's
/// interval must sit inside (Contains) or overlap (Intersects) the window's.
#[inline]
fn passes_interval(rel: Relationship, zq: &ZInterval, key: u64, zmax: u64) -> bool {
    match rel {
        Relationship::Contains => key >= zq.zmin.0 && zmax <= zq.zmax.0,
        Relationship::Intersects => zmax >= zq.zmin.0,
    }
}
