// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Inserts and deletes, with leaf expansion, splits, merges and contraction.

use log::trace;

use super::leaf::Leaf;
use super::{GeomId, GlinIndex, Internal, Node, NodeId, Record};
use crate::error::Result;
use crate::geometry::Geometry;
use crate::zcurve::zitvl;

impl GlinIndex {
    /// Adds one record. The target leaf's MBR grows to cover it, and the
    /// attached piecewise function (if any) is updated.
    pub fn insert(&mut self, geometry: Geometry, id: GeomId) -> Result<()> {
        let z = zitvl(&geometry, &self.cfg)?;
        let mbr = geometry.mbr();
        let key = z.zmin.0;
        let leaf_id = loop {
            let leaf_id = self.route(key);
            let leaf = self.leaf(leaf_id);
            let fits = leaf.count < leaf.capacity()
                && (leaf.count + 1) as f64 <= self.params.upper_density * leaf.capacity() as f64;
            if fits {
                break leaf_id;
            }
            self.grow(leaf_id);
        };
        let handle = self.store_record(Record {
            key: z.zmin,
            zmax: z.zmax,
            id,
            geometry,
            mbr,
        });
        let leaf = self.leaf_mut(leaf_id);
        leaf.insert(key, handle);
        leaf.expand_mbr(&mbr);
        self.len += 1;
        if let Some(pw) = &mut self.piecewise {
            pw.on_insert(z.zmin, z.zmax);
        }
        Ok(())
    }

    /// Removes every record whose key and geometry equal `geometry`'s.
    /// Returns how many were removed. Leaf MBRs are left as they are.
    pub fn delete(&mut self, geometry: &Geometry) -> Result<usize> {
        let z = zitvl(geometry, &self.cfg)?;
        let mut hits = Vec::new();
        let mut cursor = self.model_traversal(z.zmin);
        while let Some(c) = cursor {
            let r = self.record_at(c);
            if r.key != z.zmin {
                break;
            }
            if r.geometry == *geometry {
                hits.push(c);
            }
            cursor = self.advance(c);
        }
        let mut touched: Vec<NodeId> = Vec::new();
        for c in &hits {
            let handle = self.leaf_mut(c.leaf).remove(c.slot);
            let rec = self.take_record(handle);
            self.len -= 1;
            if let Some(pw) = &mut self.piecewise {
                pw.on_delete(rec.key, rec.zmax);
            }
            if touched.last() != Some(&c.leaf) {
                touched.push(c.leaf);
            }
        }
        for leaf in touched {
            if matches!(self.nodes[leaf as usize], Node::Leaf(_)) {
                self.shrink(leaf);
            }
        }
        Ok(hits.len())
    }

    /// Makes room in an over-full leaf: split when it is past the leaf-size
    /// limit and has distinct keys to separate, otherwise double it.
    fn grow(&mut self, id: NodeId) {
        let leaf = self.leaf(id);
        let n = leaf.count;
        let splittable = n + 1 > self.params.max_leaf_records && leaf.first_key() != leaf.entries().last().map(|e| e.0);
        if splittable {
            self.split(id);
        } else {
            let cap = (leaf.capacity() * 2).max(self.params.capacity_for(n + 1));
            trace!("expand leaf {id}: {} -> {cap}", leaf.capacity());
            self.rebuild_leaf(id, cap);
        }
    }

    /// Re-spreads a leaf's records over `capacity` slots with a refitted
    /// model. Links, parent and MBR carry over.
    fn rebuild_leaf(&mut self, id: NodeId, capacity: usize) {
        let old = self.leaf(id);
        let entries = old.entries();
        let mut leaf = Leaf::from_sorted(&entries, capacity, old.mbr);
        leaf.parent = old.parent;
        leaf.prev = old.prev;
        leaf.next = old.next;
        self.nodes[id as usize] = Node::Leaf(leaf);
    }

    fn split(&mut self, id: NodeId) {
        let leaf = self.leaf(id);
        let entries = leaf.entries();
        let (prev, next, parent) = (leaf.prev, leaf.next, leaf.parent);
        let lo = entries[0].0;
        let hi = entries[entries.len() - 1].0;
        let mut leaves = Vec::new();
        let Some(p) = parent else {
            trace!("split root leaf {id} into a subtree");
            let sub = self.build_subtree(&entries, lo, hi, None, &mut leaves);
            self.release(id);
            self.root = sub;
            self.link_leaves(&leaves, prev, next);
            return;
        };
        let (router, run) = match &self.nodes[p as usize] {
            Node::Internal(n) => (n.router, child_run(n, id)),
            _ => unreachable!("parent is internal"),
        };
        let (a, b) = run;
        let first_slot = router.predict(lo);
        let last_slot = router.predict(hi);
        if first_slot != last_slot {
            // sideways: cut the slot run at its most balanced boundary
            let half = entries.len() / 2;
            let (cut, at) = (first_slot + 1..=last_slot)
                .map(|s| (s, entries.partition_point(|e| router.predict(e.0) < s)))
                .min_by_key(|&(_, at)| at.abs_diff(half))
                .expect("at least one boundary");
            trace!("split leaf {id} sideways at slot {cut}");
            let left = self.make_leaf(&entries[..at], Some(p));
            let right = self.make_leaf(&entries[at..], Some(p));
            if let Node::Internal(n) = &mut self.nodes[p as usize] {
                for (s, c) in n.children.iter_mut().enumerate().take(b + 1).skip(a) {
                    *c = if s < cut { left } else { right };
                }
            }
            self.release(id);
            self.link_leaves(&[left, right], prev, next);
        } else {
            let (rlo, _) = router.slot_range(a);
            let (_, rhi) = router.slot_range(b);
            trace!("split leaf {id} downward");
            let sub = self.build_subtree(&entries, rlo.min(lo), rhi.max(hi), Some(p), &mut leaves);
            self.replace_child(Some(p), id, sub);
            self.release(id);
            self.link_leaves(&leaves, prev, next);
        }
    }

    /// Handles a leaf that fell below the lower density: merge with an
    /// adjacent sibling leaf when the result fits, otherwise contract.
    fn shrink(&mut self, id: NodeId) {
        let leaf = self.leaf(id);
        let cap = leaf.capacity();
        if cap == 0 || leaf.count as f64 >= self.params.lower_density * cap as f64 {
            return;
        }
        let count = leaf.count;
        if let Some(sib) = self.merge_partner(id) {
            let (left, right) = if self.leaf(sib).next == Some(id) {
                (sib, id)
            } else {
                (id, sib)
            };
            self.merge(left, right);
            return;
        }
        trace!("contract leaf {id}");
        let cap = self.params.capacity_for(count);
        self.rebuild_leaf(id, cap);
        if count == 0 {
            self.leaf_mut(id).mbr = None;
        }
    }

    /// Smaller of the leaves in the parent slots next to `id`'s run, if
    /// merging with it stays within the leaf-size limit.
    fn merge_partner(&self, id: NodeId) -> Option<NodeId> {
        let p = self.leaf(id).parent?;
        let Node::Internal(n) = &self.nodes[p as usize] else {
            return None;
        };
        let (a, b) = child_run(n, id);
        let count = self.leaf(id).count;
        let mut options = Vec::new();
        if a > 0 {
            options.push(n.children[a - 1]);
        }
        if b + 1 < n.children.len() {
            options.push(n.children[b + 1]);
        }
        options
            .into_iter()
            .filter(|&c| matches!(self.nodes[c as usize], Node::Leaf(_)))
            .map(|c| (self.leaf(c).count, c))
            .filter(|&(k, _)| k + count <= self.params.max_leaf_records)
            .min()
            .map(|(_, c)| c)
    }

    fn merge(&mut self, left: NodeId, right: NodeId) {
        trace!("merge leaves {left} and {right}");
        let (l, r) = (self.leaf(left), self.leaf(right));
        let parent = l.parent;
        let (prev, next) = (l.prev, r.next);
        let mut entries = l.entries();
        entries.extend(r.entries());
        let merged = self.make_leaf(&entries, parent);
        let p = parent.expect("merged leaves have a parent");
        if let Node::Internal(n) = &mut self.nodes[p as usize] {
            for c in n.children.iter_mut() {
                if *c == left || *c == right {
                    *c = merged;
                }
            }
        }
        self.release(left);
        self.release(right);
        self.link_leaves(&[merged], prev, next);
        self.collapse(p);
    }

    /// Replaces internal nodes whose slots all refer to one child by that
    /// child, walking upward.
    fn collapse(&mut self, mut p: NodeId) {
        loop {
            let (only, parent) = match &self.nodes[p as usize] {
                Node::Internal(n) if n.children.iter().all(|&c| c == n.children[0]) => (n.children[0], n.parent),
                _ => return,
            };
            trace!("collapse node {p}");
            self.replace_child(parent, p, only);
            self.release(p);
            match parent {
                Some(gp) => p = gp,
                None => return,
            }
        }
    }
}

/// Inclusive range of parent slots that refer to `child`.
fn child_run(n: &Internal, child: NodeId) -> (usize, usize) {
    let a = n
        .children
        .iter()
        .position(|&c| c == child)
        .expect("child listed in parent");
    let b = n.children[a..].iter().take_while(|&&c| c == child).count() + a - 1;
    (a, b)
}
