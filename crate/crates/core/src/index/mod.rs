// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! The learned index over geometries.
//!
//! Records are keyed by the `zmin` of their Z-address interval. The structure
//! is a hierarchy of equal-width partitions of the key space: internal nodes
//! route a key to a child with an exact integer linear model, leaves hold a
//! gapped record array with a fitted model, a bounding box of their members
//! and links to their neighbours in key order.
//!
//! ```
//! use glin::geometry::Geometry;
//! use glin::index::{GlinIndex, Relationship};
//!
//! let records = vec![
//!     (Geometry::rect(10.0, 10.0, 10.5, 10.5).unwrap(), 1),
//!     (Geometry::rect(40.0, -5.0, 41.0, -4.0).unwrap(), 2),
//! ];
//! let index = GlinIndex::bulk_load(records, Default::default(), Default::default()).unwrap();
//! let window = Geometry::rect(9.0, 9.0, 12.0, 12.0).unwrap();
//! assert_eq!(index.range_query(&window, Relationship::Contains).unwrap(), vec![1]);
//! ```

mod audit;
mod leaf;
mod maintain;
mod model;
mod search;
mod snapshot;

use serde::{Deserialize, Serialize};

use crate::augment::PiecewiseFunction;
use crate::error::{GlinError, Result};
use crate::geometry::{Geometry, Mbr};
use crate::zcurve::{zitvl, CurveConfig, ZAddress};

pub use audit::{IndexStats, FIELD_BYTES};
use leaf::Leaf;
pub use model::{LeafModel, Router};
pub use search::{QueryOptions, QueryStats, Relationship};

/// Caller-chosen record identifier.
pub type GeomId = u64;

pub(crate) type NodeId = u32;

/// Node-level tuning knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    /// Equal-width partitions per internal node.
    pub fanout: usize,
    /// Largest partition that may become a leaf at build time.
    pub max_leaf_records: usize,
    /// Largest rank error of a leaf's fitted model at build time.
    pub max_model_error: f64,
    pub upper_density: f64,
    pub lower_density: f64,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            fanout: 64,
            max_leaf_records: 4096,
            max_model_error: 32.0,
            upper_density: 0.8,
            lower_density: 0.4,
        }
    }
}

impl BuildParams {
    pub fn validate(&self) -> Result<()> {
        if self.fanout < 2 {
            return Err(GlinError::Config("fanout must be at least 2".into()));
        }
        if self.max_leaf_records < 1 {
            return Err(GlinError::Config("max_leaf_records must be positive".into()));
        }
        if self.max_model_error.is_nan() || self.max_model_error < 0.0 {
            return Err(GlinError::Config("max_model_error must be non-negative".into()));
        }
        if !(0.0 < self.lower_density && self.lower_density < self.upper_density && self.upper_density <= 1.0) {
            return Err(GlinError::Config(format!(
                "need 0 < lower_density ({}) < upper_density ({}) <= 1",
                self.lower_density, self.upper_density
            )));
        }
        // doubling a leaf at the upper limit must land above the lower one
        if self.upper_density / 2.0 < self.lower_density - 1e-12 {
            return Err(GlinError::Config(
                "upper_density / 2 must not fall below lower_density".into(),
            ));
        }
        Ok(())
    }

    /// Fill ratio of freshly built or rebuilt leaves.
    pub(crate) fn initial_density(&self) -> f64 {
        (self.lower_density + self.upper_density) / 2.0
    }

    pub(crate) fn capacity_for(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            ((n as f64 / self.initial_density()).ceil() as usize).max(n + 1)
        }
    }
}

/// A stored record.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// Index key: `zmin` of the geometry's interval.
    pub key: ZAddress,
    pub zmax: ZAddress,
    pub id: GeomId,
    pub geometry: Geometry,
    pub mbr: Mbr,
}

#[derive(Debug, Clone)]
pub(crate) struct Internal {
    pub parent: Option<NodeId>,
    pub router: Router,
    pub children: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Internal(Internal),
    Leaf(Leaf),
    Vacant,
}

/// Position of a stored record: a leaf and an occupied slot inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cursor {
    pub(crate) leaf: NodeId,
    pub(crate) slot: usize,
}

/// The index. Single writer, many readers: `&self` methods may run
/// concurrently; mutations need `&mut self`.
#[derive(Debug, Clone)]
pub struct GlinIndex {
    cfg: CurveConfig,
    params: BuildParams,
    nodes: Vec<Node>,
    free_nodes: Vec<NodeId>,
    root: NodeId,
    head: NodeId,
    records: Vec<Option<Record>>,
    free_records: Vec<u32>,
    len: usize,
    piecewise: Option<PiecewiseFunction>,
}

impl GlinIndex {
    /// An index with no records: a single empty leaf.
    pub fn new(cfg: CurveConfig, params: BuildParams) -> Result<Self> {
        params.validate()?;
        let mut idx = Self {
            cfg,
            params,
            nodes: Vec::new(),
            free_nodes: Vec::new(),
            root: 0,
            head: 0,
            records: Vec::new(),
            free_records: Vec::new(),
            len: 0,
            piecewise: None,
        };
        let leaf = idx.alloc(Node::Leaf(Leaf::from_sorted(&[], 0, None)));
        idx.root = leaf;
        idx.head = leaf;
        Ok(idx)
    }

    /// Builds the index over `records`: sort by `zmin`, then partition the
    /// key range top-down until every partition fits a leaf.
    pub fn bulk_load(
        records: impl IntoIterator<Item = (Geometry, GeomId)>,
        cfg: CurveConfig,
        params: BuildParams,
    ) -> Result<Self> {
        let mut idx = Self::new(cfg, params)?;
        let mut staged = Vec::new();
        for (geometry, id) in records {
            let z = zitvl(&geometry, &cfg)?;
            let mbr = geometry.mbr();
            staged.push(Record {
                key: z.zmin,
                zmax: z.zmax,
                id,
                geometry,
                mbr,
            });
        }
        if staged.is_empty() {
            return Err(GlinError::EmptyInput);
        }
        // stable: duplicates keep input order
        staged.sort_by_key(|r| r.key);
        idx.len = staged.len();
        let entries: Vec<(u64, u32)> = staged.iter().enumerate().map(|(i, r)| (r.key.0, i as u32)).collect();
        idx.records = staged.into_iter().map(Some).collect();

        idx.nodes.clear();
        let lo = entries[0].0;
        let hi = entries[entries.len() - 1].0;
        let mut leaves = Vec::new();
        let root = idx.build_subtree(&entries, lo, hi, None, &mut leaves);
        idx.root = root;
        idx.link_leaves(&leaves, None, None);
        idx.head = leaves[0];
        Ok(idx)
    }

    /// Same as [`bulk_load`](Self::bulk_load), then attaches a piecewise
    /// function so Intersects queries are answered exactly.
    pub fn bulk_load_with_piecewise(
        records: impl IntoIterator<Item = (Geometry, GeomId)>,
        cfg: CurveConfig,
        params: BuildParams,
        piece_limitation: usize,
    ) -> Result<Self> {
        let mut idx = Self::bulk_load(records, cfg, params)?;
        idx.attach_piecewise(piece_limitation);
        Ok(idx)
    }

    /// Builds (or rebuilds) the piecewise function over the live records and
    /// keeps it updated by subsequent inserts and deletes.
    pub fn attach_piecewise(&mut self, piece_limitation: usize) {
        let pw = PiecewiseFunction::build(self.key_pairs(), piece_limitation);
        self.piecewise = Some(pw);
    }

    pub fn detach_piecewise(&mut self) -> Option<PiecewiseFunction> {
        self.piecewise.take()
    }

    pub fn piecewise(&self) -> Option<&PiecewiseFunction> {
        self.piecewise.as_ref()
    }

    /// Replaces the piecewise function with a fresh build over live records.
    pub fn rebuild_piecewise(&mut self) {
        if let Some(pw) = &self.piecewise {
            let rebuilt = pw.rebuild(self.key_pairs());
            self.piecewise = Some(rebuilt);
        }
    }

    pub(crate) fn set_piecewise(&mut self, pw: Option<PiecewiseFunction>) {
        self.piecewise = pw;
    }

    fn key_pairs(&self) -> Vec<(ZAddress, ZAddress)> {
        self.iter().map(|r| (r.key, r.zmax)).collect()
    }

    pub fn config(&self) -> &CurveConfig {
        &self.cfg
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All records in key order, following the leaf links.
    pub fn iter(&self) -> impl Iterator<Item = &Record> + '_ {
        self.leaf_chain().flat_map(move |id| {
            let leaf = self.leaf(id);
            leaf.occupied().map(move |s| self.record(leaf.slots[s]))
        })
    }

    /// Descends from the root to the first record with key `>= key`.
    /// `None` is the end sentinel.
    pub fn model_traversal(&self, key: ZAddress) -> Option<Cursor> {
        let leaf = self.route(key.0);
        match self.leaf(leaf).lower_bound(key.0) {
            Some(slot) => Some(Cursor { leaf, slot }),
            None => self.first_in_chain_after(leaf),
        }
    }

    /// Key and record at a cursor.
    pub fn record_at(&self, c: Cursor) -> &Record {
        self.record(self.leaf(c.leaf).slots[c.slot])
    }

    /// Next record in key order.
    pub fn advance(&self, c: Cursor) -> Option<Cursor> {
        let leaf = self.leaf(c.leaf);
        match leaf.next_occupied(c.slot + 1) {
            Some(slot) => Some(Cursor { leaf: c.leaf, slot }),
            None => self.first_in_chain_after(c.leaf),
        }
    }

    /// Number of nodes visited by a root-to-leaf descent for `key`.
    pub fn traversal_length(&self, key: ZAddress) -> usize {
        let mut id = self.root;
        let mut visited = 1;
        while let Node::Internal(n) = &self.nodes[id as usize] {
            id = n.children[n.router.predict(key.0)];
            visited += 1;
        }
        visited
    }

    fn first_in_chain_after(&self, leaf: NodeId) -> Option<Cursor> {
        let mut next = self.leaf(leaf).next;
        while let Some(id) = next {
            let l = self.leaf(id);
            if let Some(slot) = l.next_occupied(0) {
                return Some(Cursor { leaf: id, slot });
            }
            next = l.next;
        }
        None
    }

    pub(crate) fn route(&self, key: u64) -> NodeId {
        let mut id = self.root;
        loop {
            match &self.nodes[id as usize] {
                Node::Internal(n) => id = n.children[n.router.predict(key)],
                Node::Leaf(_) => return id,
                Node::Vacant => unreachable!("route reached a vacant node"),
            }
        }
    }

    pub(crate) fn leaf(&self, id: NodeId) -> &Leaf {
        match &self.nodes[id as usize] {
            Node::Leaf(l) => l,
            _ => panic!("node {id} is not a leaf"),
        }
    }

    pub(crate) fn leaf_mut(&mut self, id: NodeId) -> &mut Leaf {
        match &mut self.nodes[id as usize] {
            Node::Leaf(l) => l,
            _ => panic!("node {id} is not a leaf"),
        }
    }

    pub(crate) fn record(&self, handle: u32) -> &Record {
        self.records[handle as usize].as_ref().expect("live record handle")
    }

    pub(crate) fn leaf_chain(&self) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(Some(self.head), move |&id| self.leaf(id).next)
    }

    pub(crate) fn alloc(&mut self, node: Node) -> NodeId {
        match self.free_nodes.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as NodeId
            }
        }
    }

    pub(crate) fn release(&mut self, id: NodeId) {
        self.nodes[id as usize] = Node::Vacant;
        self.free_nodes.push(id);
    }

    pub(crate) fn store_record(&mut self, r: Record) -> u32 {
        match self.free_records.pop() {
            Some(h) => {
                self.records[h as usize] = Some(r);
                h
            }
            None => {
                self.records.push(Some(r));
                (self.records.len() - 1) as u32
            }
        }
    }

    pub(crate) fn take_record(&mut self, h: u32) -> Record {
        let r = self.records[h as usize].take().expect("live record handle");
        self.free_records.push(h);
        r
    }

    fn mbr_of(&self, entries: &[(u64, u32)]) -> Option<Mbr> {
        entries
            .iter()
            .map(|&(_, h)| self.record(h).mbr)
            .reduce(|a, b| a.union(&b))
    }

    pub(crate) fn make_leaf(&mut self, entries: &[(u64, u32)], parent: Option<NodeId>) -> NodeId {
        let mbr = self.mbr_of(entries);
        let mut leaf = Leaf::from_sorted(entries, self.params.capacity_for(entries.len()), mbr);
        leaf.parent = parent;
        self.alloc(Node::Leaf(leaf))
    }

    /// Recursively partitions sorted `entries` over the inclusive key range
    /// `[lo, hi]`. New leaves are appended to `leaves` in key order.
    pub(crate) fn build_subtree(
        &mut self,
        entries: &[(u64, u32)],
        lo: u64,
        hi: u64,
        parent: Option<NodeId>,
        leaves: &mut Vec<NodeId>,
    ) -> NodeId {
        let n = entries.len();
        let single_key = n == 0 || entries[0].0 == entries[n - 1].0;
        let fits = n <= self.params.max_leaf_records && {
            let keys: Vec<u64> = entries.iter().map(|e| e.0).collect();
            let spread = self.params.capacity_for(n) as f64 / n.max(1) as f64;
            LeafModel::fit(&keys).max_error(&keys) * spread <= self.params.max_model_error
        };
        if fits || single_key || lo >= hi {
            let id = self.make_leaf(entries, parent);
            leaves.push(id);
            return id;
        }
        let router = Router::over(lo, hi, self.params.fanout);
        let id = self.alloc(Node::Internal(Internal {
            parent,
            router,
            children: Vec::with_capacity(router.fanout),
        }));
        let mut children = Vec::with_capacity(router.fanout);
        let mut start = 0;
        for slot in 0..router.fanout {
            let end = if slot + 1 == router.fanout {
                n
            } else {
                start + entries[start..].partition_point(|e| router.predict(e.0) <= slot)
            };
            let (clo, chi) = router.slot_range(slot);
            let chi = chi.min(hi);
            children.push(self.build_subtree(&entries[start..end], clo, chi, Some(id), leaves));
            start = end;
        }
        if let Node::Internal(node) = &mut self.nodes[id as usize] {
            node.children = children;
        }
        id
    }

    /// Chains `leaves` in order between `prev` and `next`.
    pub(crate) fn link_leaves(&mut self, leaves: &[NodeId], prev: Option<NodeId>, next: Option<NodeId>) {
        for (i, &id) in leaves.iter().enumerate() {
            let p = if i == 0 { prev } else { Some(leaves[i - 1]) };
            let n = leaves.get(i + 1).copied().or(next);
            let leaf = self.leaf_mut(id);
            leaf.prev = p;
            leaf.next = n;
        }
        match prev {
            Some(p) => self.leaf_mut(p).next = leaves.first().copied(),
            None => {
                if let Some(&first) = leaves.first() {
                    self.head = first;
                }
            }
        }
        if let (Some(n), Some(&last)) = (next, leaves.last()) {
            self.leaf_mut(n).prev = Some(last);
        }
    }

    pub(crate) fn parent_of(&self, id: NodeId) -> Option<NodeId> {
        match &self.nodes[id as usize] {
            Node::Internal(n) => n.parent,
            Node::Leaf(l) => l.parent,
            Node::Vacant => None,
        }
    }

    pub(crate) fn set_parent(&mut self, id: NodeId, parent: Option<NodeId>) {
        match &mut self.nodes[id as usize] {
            Node::Internal(n) => n.parent = parent,
            Node::Leaf(l) => l.parent = parent,
            Node::Vacant => {}
        }
    }

    /// Points every parent slot (or the root) that refers to `old` at `new`.
    pub(crate) fn replace_child(&mut self, parent: Option<NodeId>, old: NodeId, new: NodeId) {
        match parent {
            None => {
                debug_assert_eq!(self.root, old);
                self.root = new;
            }
            Some(p) => {
                if let Node::Internal(n) = &mut self.nodes[p as usize] {
                    for c in n.children.iter_mut().filter(|c| **c == old) {
                        *c = new;
                    }
                }
            }
        }
        self.set_parent(new, parent);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rects(n: usize) -> Vec<(Geometry, GeomId)> {
        (0..n)
            .map(|i| {
                let x = -170.0 + (i % 300) as f64 * 1.1;
                let y = -80.0 + (i / 300) as f64 * 0.9;
                (Geometry::rect(x, y, x + 0.01, y + 0.01).unwrap(), i as GeomId)
            })
            .collect()
    }

    #[test]
    fn single_record_is_root_leaf() {
        let idx = GlinIndex::bulk_load(rects(1), CurveConfig::default(), BuildParams::default()).unwrap();
        assert_eq!(idx.root, idx.head);
        assert!(matches!(idx.nodes[idx.root as usize], Node::Leaf(_)));
        assert_eq!(idx.len(), 1);
    }

    #[test]
    fn empty_input_is_rejected() {
        let err = GlinIndex::bulk_load(vec![], CurveConfig::default(), BuildParams::default()).unwrap_err();
        assert!(matches!(err, GlinError::EmptyInput));
    }

    #[test]
    fn bad_params_are_rejected() {
        let p = BuildParams {
            fanout: 1,
            ..Default::default()
        };
        assert!(GlinIndex::new(CurveConfig::default(), p).is_err());
        let p = BuildParams {
            lower_density: 0.9,
            ..Default::default()
        };
        assert!(GlinIndex::new(CurveConfig::default(), p).is_err());
    }

    #[test]
    fn traversal_is_lower_bound() {
        let params = BuildParams {
            max_leaf_records: 16,
            max_model_error: 2.0,
            ..Default::default()
        };
        let idx = GlinIndex::bulk_load(rects(5000), CurveConfig::default(), params).unwrap();
        let mut keys: Vec<u64> = idx.iter().map(|r| r.key.0).collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        keys.dedup();
        let first = keys[0];
        let c = idx.model_traversal(ZAddress(0)).unwrap();
        assert_eq!(idx.record_at(c).key.0, first);
        for &k in keys.iter().step_by(37) {
            let c = idx.model_traversal(ZAddress(k)).unwrap();
            assert_eq!(idx.record_at(c).key.0, k);
            let c = idx
                .model_traversal(ZAddress(k + 1))
                .unwrap_or_else(|| panic!("after {k}"));
            let want = keys[keys.partition_point(|&x| x <= k)];
            assert_eq!(idx.record_at(c).key.0, want);
        }
        assert!(idx.model_traversal(ZAddress(*keys.last().unwrap() + 1)).is_none());
    }

    #[test]
    fn duplicate_keys_stay_adjacent() {
        let g = Geometry::rect(1.0, 1.0, 1.0000001, 1.0000001).unwrap();
        let recs: Vec<_> = (0..100).map(|i| (g.clone(), i)).collect();
        let idx = GlinIndex::bulk_load(recs, CurveConfig::default(), BuildParams::default()).unwrap();
        assert_eq!(idx.leaf_chain().count(), 1);
        let ids: Vec<GeomId> = idx.iter().map(|r| r.id).collect();
        assert_eq!(ids, (0..100).collect::<Vec<_>>());
        let c = idx
            .model_traversal(idx.record_at(idx.model_traversal(ZAddress(0)).unwrap()).key)
            .unwrap();
        assert_eq!(idx.record_at(c).id, 0);
    }
}
