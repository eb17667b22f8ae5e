// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Gapped-array leaf node.
//!
//! `keys` has one entry per slot. An empty slot repeats the key of the next
//! occupied slot to its right (or `u64::MAX` past the last one), which keeps
//! the array sorted so lower-bound searches need not know about gaps.

use super::model::LeafModel;
use super::NodeId;
use crate::geometry::Mbr;

pub(crate) const GAP: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Leaf {
    pub parent: Option<NodeId>,
    pub prev: Option<NodeId>,
    pub next: Option<NodeId>,
    pub model: LeafModel,
    pub keys: Vec<u64>,
    /// Record handles; [`GAP`] marks an empty slot.
    pub slots: Vec<u32>,
    pub count: usize,
    /// Covers every member geometry. Only grows until the leaf is rebuilt.
    pub mbr: Option<Mbr>,
}

impl Leaf {
    /// Spreads sorted `(key, handle)` entries over `capacity` slots by the
    /// fitted model.
    pub fn from_sorted(entries: &[(u64, u32)], capacity: usize, mbr: Option<Mbr>) -> Self {
        let n = entries.len();
        assert!(capacity >= n, "capacity {capacity} below entry count {n}");
        let keys_only: Vec<u64> = entries.iter().map(|e| e.0).collect();
        let model = if n == 0 {
            LeafModel::default()
        } else {
            LeafModel::fit(&keys_only).scaled(capacity as f64 / n as f64)
        };
        let mut keys = vec![u64::MAX; capacity];
        let mut slots = vec![GAP; capacity];
        let mut last: isize = -1;
        for (i, &(k, h)) in entries.iter().enumerate() {
            let room = (capacity - (n - i)) as isize;
            let pos = (model.predict_slot(k, capacity) as isize).max(last + 1).min(room);
            keys[pos as usize] = k;
            slots[pos as usize] = h;
            last = pos;
        }
        let mut leaf = Leaf {
            parent: None,
            prev: None,
            next: None,
            model,
            keys,
            slots,
            count: n,
            mbr,
        };
        leaf.refill_gaps();
        leaf
    }

    fn refill_gaps(&mut self) {
        let mut next = u64::MAX;
        for j in (0..self.slots.len()).rev() {
            if self.slots[j] == GAP {
                self.keys[j] = next;
            } else {
                next = self.keys[j];
            }
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn density(&self) -> f64 {
        if self.slots.is_empty() {
            0.0
        } else {
            self.count as f64 / self.slots.len() as f64
        }
    }

    #[inline]
    pub fn is_occupied(&self, slot: usize) -> bool {
        self.slots[slot] != GAP
    }

    /// Smallest stored key, if any.
    pub fn first_key(&self) -> Option<u64> {
        if self.count == 0 {
            None
        } else {
            self.keys.first().copied()
        }
    }

    /// Occupied `(key, handle)` pairs in slot order.
    pub fn entries(&self) -> Vec<(u64, u32)> {
        self.occupied().map(|i| (self.keys[i], self.slots[i])).collect()
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.slots.len()).filter(move |&i| self.slots[i] != GAP)
    }

    pub fn next_occupied(&self, from: usize) -> Option<usize> {
        (from..self.slots.len()).find(|&i| self.slots[i] != GAP)
    }

    /// First slot index whose key is `>= key` (may be a gap), or `len`.
    /// Exponential search around the model's prediction.
    pub fn lower_bound_index(&self, key: u64) -> usize {
        let keys = &self.keys;
        let n = keys.len();
        if n == 0 {
            return 0;
        }
        let pred = self.model.predict_slot(key, n);
        if keys[pred] >= key {
            let mut hi = pred;
            let mut step = 1;
            loop {
                let lo = pred.saturating_sub(step);
                if lo == 0 || keys[lo] < key {
                    return lo + keys[lo..=hi].partition_point(|&k| k < key);
                }
                hi = lo;
                step *= 2;
            }
        } else {
            let mut lo = pred;
            let mut step = 1;
            loop {
                let hi = (pred + step).min(n);
                if hi == n || keys[hi] >= key {
                    return lo + 1 + keys[lo + 1..hi].partition_point(|&k| k < key);
                }
                lo = hi;
                step *= 2;
            }
        }
    }

    /// First occupied slot with key `>= key`.
    pub fn lower_bound(&self, key: u64) -> Option<usize> {
        if self.count == 0 {
            return None;
        }
        let i = self.lower_bound_index(key);
        self.next_occupied(i)
    }

    /// Places one entry after any equal keys. Requires a free slot.
    pub fn insert(&mut self, key: u64, handle: u32) {
        debug_assert!(self.count < self.capacity(), "insert into full leaf");
        let n = self.slots.len();
        let p = if key == u64::MAX {
            n
        } else {
            self.lower_bound_index(key + 1)
        };
        if p < n && self.slots[p] == GAP {
            // gap run [p, r): any position keeps the order
            let r = self.next_occupied(p).unwrap_or(n);
            let pos = self.model.predict_slot(key, n).clamp(p, r - 1);
            for j in p..pos {
                self.keys[j] = key;
            }
            self.keys[pos] = key;
            self.slots[pos] = handle;
        } else {
            let right = (p..n).find(|&j| self.slots[j] == GAP);
            let left = (0..p).rev().find(|&j| self.slots[j] == GAP);
            let use_right = match (left, right) {
                (Some(l), Some(r)) => r - p <= p - l,
                (None, Some(_)) => true,
                (Some(_), None) => false,
                (None, None) => unreachable!("leaf has a free slot"),
            };
            if use_right {
                let g = right.expect("checked");
                self.keys.copy_within(p..g, p + 1);
                self.slots.copy_within(p..g, p + 1);
                self.keys[p] = key;
                self.slots[p] = handle;
            } else {
                let g = left.expect("checked");
                self.keys.copy_within(g + 1..p, g);
                self.slots.copy_within(g + 1..p, g);
                self.keys[p - 1] = key;
                self.slots[p - 1] = handle;
            }
        }
        self.count += 1;
    }

    /// Empties a slot, returning its handle.
    pub fn remove(&mut self, slot: usize) -> u32 {
        let h = self.slots[slot];
        debug_assert!(h != GAP, "removing a gap");
        self.slots[slot] = GAP;
        let fill = if slot + 1 < self.keys.len() {
            self.keys[slot + 1]
        } else {
            u64::MAX
        };
        self.keys[slot] = fill;
        let mut j = slot;
        while j > 0 && self.slots[j - 1] == GAP {
            self.keys[j - 1] = fill;
            j -= 1;
        }
        self.count -= 1;
        h
    }

    pub fn expand_mbr(&mut self, m: &Mbr) {
        self.mbr = Some(match self.mbr {
            Some(cur) => cur.union(m),
            None => *m,
        });
    }

    /// Checks slot order and gap fills.
    pub fn check(&self) -> Result<(), String> {
        let mut expected_fill = u64::MAX;
        let mut occupied = 0;
        for j in (0..self.slots.len()).rev() {
            if self.slots[j] == GAP {
                if self.keys[j] != expected_fill {
                    return Err(format!("gap {j} holds {} instead of {expected_fill}", self.keys[j]));
                }
            } else {
                occupied += 1;
                if self.keys[j] > expected_fill {
                    return Err(format!("slot {j} key {} out of order", self.keys[j]));
                }
                expected_fill = self.keys[j];
            }
        }
        if occupied != self.count {
            return Err(format!("count {} but {occupied} occupied slots", self.count));
        }
        Ok(())
    }
}
