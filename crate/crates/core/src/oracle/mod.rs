// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Reference engines: a brute-force scan (ground truth) and a packed STR
//! R-tree (size and probing baseline).

mod rtree;
mod scan;

pub use rtree::{RTreeStats, StrRTree, DEFAULT_RTREE_FANOUT};
pub use scan::FlatStore;

use crate::geometry::Geometry;
use crate::index::{GeomId, Relationship};

/// Brute-force answer: `rel` applied to every record.
pub fn scan_query(store: &FlatStore, q: &Geometry, rel: Relationship) -> Vec<GeomId> {
    store.query(q, rel)
}

/// MBR-filtered tree descent followed by the exact predicate.
pub fn rtree_query(tree: &StrRTree, q: &Geometry, rel: Relationship) -> Vec<GeomId> {
    tree.query(q, rel).0
}

pub fn rtree_stats(tree: &StrRTree) -> RTreeStats {
    tree.stats()
}

/// Ids present in only one of two multisets, as (`missing` from `got`,
/// `unexpected` in `got`), each sorted.
pub fn multiset_diff(expected: &[GeomId], got: &[GeomId]) -> (Vec<GeomId>, Vec<GeomId>) {
    let mut e = expected.to_vec();
    let mut g = got.to_vec();
    e.sort_unstable();
    g.sort_unstable();
    let (mut i, mut j) = (0, 0);
    let (mut missing, mut unexpected) = (Vec::new(), Vec::new());
    while i < e.len() || j < g.len() {
        match (e.get(i), g.get(j)) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                missing.push(*a);
                i += 1;
            }
            (Some(_), Some(b)) => {
                unexpected.push(*b);
                j += 1;
            }
            (Some(a), None) => {
                missing.push(*a);
                i += 1;
            }
            (None, Some(b)) => {
                unexpected.push(*b);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (missing, unexpected)
}
