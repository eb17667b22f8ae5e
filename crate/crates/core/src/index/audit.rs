// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Size accounting and structural checks.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{GlinIndex, Node, NodeId};
use crate::error::{GlinError, Result};
use crate::zcurve::zitvl;

/// Bytes charged per stored number or reference.
pub const FIELD_BYTES: usize = 8;

/// Fields charged per leaf: model (anchor, slope, intercept), MBR (4),
/// next and prev links, parent, count, capacity.
const LEAF_FIELDS: usize = 3 + 4 + 2 + 1 + 1 + 1;

/// Fields charged per internal node on top of one per child: model (base,
/// width), parent.
const INTERNAL_FIELDS: usize = 3;

/// Structure summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexStats {
    pub node_count: usize,
    pub leaf_count: usize,
    pub depth: usize,
    /// Internal nodes plus leaf metadata, excluding records.
    pub metadata_bytes: usize,
    pub record_count: usize,
}

impl GlinIndex {
    pub fn stats(&self) -> IndexStats {
        let mut node_count = 0;
        let mut leaf_count = 0;
        let mut depth = 0;
        let mut bytes = 0;
        let mut stack = vec![(self.root, 1usize)];
        let mut seen = HashSet::new();
        while let Some((id, d)) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            node_count += 1;
            depth = depth.max(d);
            match &self.nodes[id as usize] {
                Node::Internal(n) => {
                    bytes += FIELD_BYTES * (INTERNAL_FIELDS + n.children.len());
                    stack.extend(n.children.iter().map(|&c| (c, d + 1)));
                }
                Node::Leaf(_) => {
                    leaf_count += 1;
                    bytes += FIELD_BYTES * LEAF_FIELDS;
                }
                Node::Vacant => {}
            }
        }
        IndexStats {
            node_count,
            leaf_count,
            depth,
            metadata_bytes: bytes,
            record_count: self.len,
        }
    }

    /// Record count of every leaf, in key order.
    pub fn leaf_sizes(&self) -> Vec<usize> {
        self.leaf_chain().map(|id| self.leaf(id).count).collect()
    }

    /// Checks every structural invariant, returning the first violation.
    ///
    /// Covered: parent/child consistency, exact routing of every stored key,
    /// the leaf chain matching the tree's leaves in order, sorted gapped
    /// arrays, leaf MBRs covering members, leaf density limits (empty leaves
    /// exempt), record keys matching their geometry, the record count, and
    /// the piecewise function's own invariants and coverage of every record.
    pub fn audit(&self) -> Result<()> {
        let fail = |m: String| Err(GlinError::Audit(m));
        let mut tree_leaves = Vec::new();
        self.collect_leaves(self.root, None, &mut tree_leaves, &mut HashSet::new())?;
        let chain: Vec<NodeId> = self.leaf_chain().collect();
        if chain != tree_leaves {
            return fail(format!(
                "leaf chain ({} leaves) differs from tree order ({} leaves)",
                chain.len(),
                tree_leaves.len()
            ));
        }
        if self.leaf(self.head).prev.is_some() {
            return fail("head leaf has a predecessor".into());
        }
        let mut last_key = 0u64;
        let mut total = 0usize;
        let mut prev: Option<NodeId> = None;
        for &id in &chain {
            let leaf = self.leaf(id);
            if leaf.prev != prev {
                return fail(format!("leaf {id} prev link {:?}, expected {prev:?}", leaf.prev));
            }
            prev = Some(id);
            leaf.check().or_else(|m| fail(format!("leaf {id}: {m}")))?;
            if leaf.count > 0 {
                let d = leaf.density();
                let lo = self.params.lower_density;
                let hi = self.params.upper_density;
                if d < lo - 1e-9 || d > hi + 1e-9 {
                    return fail(format!("leaf {id} density {d:.3} outside [{lo}, {hi}]"));
                }
            }
            for slot in leaf.occupied() {
                let key = leaf.keys[slot];
                let r = self.record(leaf.slots[slot]);
                if r.key.0 != key {
                    return fail(format!("slot key {key} differs from record key {}", r.key.0));
                }
                let z = zitvl(&r.geometry, &self.cfg)?;
                if z.zmin != r.key || z.zmax != r.zmax {
                    return fail(format!("record {} has stale interval", r.id));
                }
                if key < last_key {
                    return fail(format!("key {key} after {last_key} in leaf {id}"));
                }
                last_key = key;
                if !leaf.mbr.is_some_and(|m| m.contains_mbr(&r.mbr)) {
                    return fail(format!("leaf {id} MBR misses record {}", r.id));
                }
                if self.route(key) != id {
                    return fail(format!("key {key} routes away from leaf {id}"));
                }
                total += 1;
            }
        }
        if total != self.len {
            return fail(format!("{total} records reachable, {} counted", self.len));
        }
        let live = self.records.iter().filter(|r| r.is_some()).count();
        if live != self.len {
            return fail(format!("{live} live record slots, {} counted", self.len));
        }
        if let Some(pw) = &self.piecewise {
            pw.check_invariants().or_else(|m| fail(format!("piecewise: {m}")))?;
            if pw.record_count() != self.len as u64 {
                return fail(format!(
                    "piecewise covers {} records, index holds {}",
                    pw.record_count(),
                    self.len
                ));
            }
            for r in self.iter() {
                let lowered = pw.augment(crate::zcurve::ZInterval::new(r.zmax, r.zmax));
                if lowered.zmin > r.key {
                    return fail(format!("piecewise does not lower to record {}", r.id));
                }
            }
        }
        Ok(())
    }

    fn collect_leaves(
        &self,
        id: NodeId,
        parent: Option<NodeId>,
        out: &mut Vec<NodeId>,
        seen: &mut HashSet<NodeId>,
    ) -> Result<()> {
        let fail = |m: String| Err(GlinError::Audit(m));
        if self.parent_of(id) != parent {
            return fail(format!(
                "node {id} parent {:?}, expected {parent:?}",
                self.parent_of(id)
            ));
        }
        match &self.nodes[id as usize] {
            Node::Internal(n) => {
                if n.children.len() != n.router.fanout {
                    return fail(format!(
                        "node {id} has {} children for fanout {}",
                        n.children.len(),
                        n.router.fanout
                    ));
                }
                let mut last = None;
                for &c in &n.children {
                    if Some(c) == last {
                        continue;
                    }
                    if !seen.insert(c) {
                        return fail(format!("node {c} is referenced from separate slot runs"));
                    }
                    self.collect_leaves(c, Some(id), out, seen)?;
                    last = Some(c);
                }
                Ok(())
            }
            Node::Leaf(_) => {
                out.push(id);
                Ok(())
            }
            Node::Vacant => fail(format!("node {id} is vacant but referenced")),
        }
    }
}
