// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Static R-tree packed with sort-tile-recursive loading.

use serde::{Deserialize, Serialize};

use crate::error::{GlinError, Result};
use crate::geometry::{Geometry, Mbr};
use crate::index::{GeomId, Relationship, FIELD_BYTES};

pub const DEFAULT_RTREE_FANOUT: usize = 16;

/// Fields charged per node: MBR (4) and entry count.
const NODE_FIELDS: usize = 5;
/// Fields charged per entry: MBR (4) and child or record reference.
const ENTRY_FIELDS: usize = 5;

#[derive(Debug, Clone)]
struct RNode {
    mbr: Mbr,
    /// Child node indices, or record indices at the leaf level.
    entries: Vec<usize>,
    leaf: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RTreeStats {
    pub node_count: usize,
    pub height: usize,
    pub metadata_bytes: usize,
}

/// Read-only after build.
#[derive(Debug, Clone)]
pub struct StrRTree {
    fanout: usize,
    records: Vec<(GeomId, Geometry, Mbr)>,
    nodes: Vec<RNode>,
    root: Option<usize>,
    height: usize,
}

impl StrRTree {
    pub fn bulk_load(records: impl IntoIterator<Item = (Geometry, GeomId)>, fanout: usize) -> Result<Self> {
        if fanout < 2 {
            return Err(GlinError::Config("R-tree fanout must be at least 2".into()));
        }
        let records: Vec<(GeomId, Geometry, Mbr)> = records
            .into_iter()
            .map(|(g, id)| {
                let m = g.mbr();
                (id, g, m)
            })
            .collect();
        let mut tree = Self {
            fanout,
            records,
            nodes: Vec::new(),
            root: None,
            height: 0,
        };
        if tree.records.is_empty() {
            return Ok(tree);
        }
        let items: Vec<(usize, Mbr)> = tree.records.iter().enumerate().map(|(i, r)| (i, r.2)).collect();
        let mut level = tree.pack(items, true);
        tree.height = 1;
        while level.len() > 1 {
            let items = level.iter().map(|&n| (n, tree.nodes[n].mbr)).collect();
            level = tree.pack(items, false);
            tree.height += 1;
        }
        tree.root = Some(level[0]);
        Ok(tree)
    }

    /// Packs one level: sort by center x, cut into vertical slices, sort each
    /// slice by center y, chunk into nodes.
    fn pack(&mut self, mut items: Vec<(usize, Mbr)>, leaf: bool) -> Vec<usize> {
        let f = self.fanout;
        let pages = items.len().div_ceil(f);
        let slices = (pages as f64).sqrt().ceil() as usize;
        let per_slice = slices * f;
        items.sort_by(|a, b| a.1.center().lon.total_cmp(&b.1.center().lon));
        let mut out = Vec::with_capacity(pages);
        for slice in items.chunks_mut(per_slice) {
            slice.sort_by(|a, b| a.1.center().lat.total_cmp(&b.1.center().lat));
            for chunk in slice.chunks(f) {
                let mbr = chunk
                    .iter()
                    .map(|c| c.1)
                    .reduce(|a, b| a.union(&b))
                    .expect("non-empty chunk");
                self.nodes.push(RNode {
                    mbr,
                    entries: chunk.iter().map(|c| c.0).collect(),
                    leaf,
                });
                out.push(self.nodes.len() - 1);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    /// Matching ids and the number of records handed to the exact predicate.
    pub fn query(&self, q: &Geometry, rel: Relationship) -> (Vec<GeomId>, u64) {
        let candidates = self.probe(&q.mbr(), rel);
        let n = candidates.len() as u64;
        (self.refine(&candidates, q, rel), n)
    }

    /// Records whose MBR passes the filter for `rel`: contained in the
    /// window's MBR for Contains, intersecting it for Intersects.
    pub fn probe(&self, qm: &Mbr, rel: Relationship) -> Vec<usize> {
        let mut out = Vec::new();
        let Some(root) = self.root else {
            return out;
        };
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.mbr.intersects(qm) {
                continue;
            }
            if !node.leaf {
                stack.extend(node.entries.iter().rev());
                continue;
            }
            out.extend(node.entries.iter().copied().filter(|&i| {
                let m = &self.records[i].2;
                match rel {
                    Relationship::Contains => qm.contains_mbr(m),
                    Relationship::Intersects => qm.intersects(m),
                }
            }));
        }
        out
    }

    /// Exact predicate over probed candidates.
    pub fn refine(&self, candidates: &[usize], q: &Geometry, rel: Relationship) -> Vec<GeomId> {
        candidates
            .iter()
            .map(|&i| &self.records[i])
            .filter(|(_, g, _)| rel.holds(q, g))
            .map(|(id, _, _)| *id)
            .collect()
    }

    pub fn stats(&self) -> RTreeStats {
        let entries: usize = self.nodes.iter().map(|n| n.entries.len()).sum();
        RTreeStats {
            node_count: self.nodes.len(),
            height: self.height,
            metadata_bytes: FIELD_BYTES * (NODE_FIELDS * self.nodes.len() + ENTRY_FIELDS * entries),
        }
    }

    /// Checks entry counts and that every child MBR lies inside its parent's.
    pub fn check(&self) -> std::result::Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.entries.is_empty() || n.entries.len() > self.fanout {
                return Err(format!("node {i} has {} entries", n.entries.len()));
            }
            for &e in &n.entries {
                let m = if n.leaf { self.records[e].2 } else { self.nodes[e].mbr };
                if !n.mbr.contains_mbr(&m) {
                    return Err(format!("node {i} does not cover entry {e}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(side: usize) -> Vec<(Geometry, GeomId)> {
        let mut v = Vec::new();
        for i in 0..side {
            for j in 0..side {
                let (x, y) = (i as f64 * 0.5 - 50.0, j as f64 * 0.5 - 50.0);
                v.push((
                    Geometry::rect(x, y, x + 0.45, y + 0.45).unwrap(),
                    (i * side + j) as GeomId,
                ));
            }
        }
        v
    }

    #[test]
    fn single_record_is_one_node() {
        let t = StrRTree::bulk_load(squares(1), 16).unwrap();
        assert_eq!(t.stats().node_count, 1);
        assert_eq!(t.stats().metadata_bytes, FIELD_BYTES * (NODE_FIELDS + ENTRY_FIELDS));
    }

    #[test]
    fn point_finds_covering_square() {
        let t = StrRTree::bulk_load(squares(20), 16).unwrap();
        t.check().unwrap();
        let p = Geometry::point(-46.3, -48.3).unwrap();
        assert_eq!(t.query(&p, Relationship::Intersects).0, vec![7 * 20 + 3]);
        let all = Geometry::rect(-51.0, -51.0, 0.0, 0.0).unwrap();
        assert_eq!(t.query(&all, Relationship::Contains).0.len(), 400);
    }

    #[test]
    fn node_count_follows_packing() {
        let n: usize = 100 * 100;
        let t = StrRTree::bulk_load(squares(100), 16).unwrap();
        // every slice packs full nodes except possibly its last one
        let mut expected_max = 0;
        let mut level = n;
        while level > 1 {
            let slices = ((level.div_ceil(16)) as f64).sqrt().ceil() as usize;
            let per = slices * 16;
            level = (level / per) * per.div_ceil(16) + (level % per).div_ceil(16);
            expected_max += level;
        }
        let s = t.stats();
        assert_eq!(s.node_count, expected_max);
        assert!(s.node_count as f64 <= n as f64 / 15.0 * 1.05);
    }
}
